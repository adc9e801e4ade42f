"""Lazy enumeration of subsets, bijections and agreement sets."""
from __future__ import annotations

import itertools
from typing import Iterator, NamedTuple, Sequence

__all__ = ["Bijection", "subsets", "bijections", "agreement_set", "derangements"]


class Bijection(NamedTuple):
    """``domain[i] -> image[i]``; both tuples have the same length."""

    domain: tuple
    image: tuple

    def __call__(self, i):
        return self.image[self.domain.index(i)]

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.image))


def subsets(universe: int, size: int) -> Iterator[tuple]:
    """Size-``size`` subsets of ``range(universe)`` in lexicographic order.

    Yields nothing when ``size > universe``.
    """
    if size < 0 or universe < 0:
        raise ValueError("universe and size must be non-negative")
    return itertools.combinations(range(universe), size)


def bijections(domain: Sequence[int], codomain: Sequence[int]) -> Iterator[Bijection]:
    dom = tuple(domain)
    cod = tuple(codomain)
    if len(dom) != len(cod):
        raise ValueError(f"domain and codomain sizes differ: {len(dom)} != {len(cod)}")
    return (Bijection(dom, img) for img in itertools.permutations(cod))


def agreement_set(f: Bijection, g: Bijection) -> tuple:
    if f.domain != g.domain:
        raise ValueError("bijections must share the same domain")
    return tuple(i for i, a, b in zip(f.domain, f.image, g.image) if a == b)


def derangements(k: int) -> int:
    """Number of fixed-point-free permutations of ``k`` elements."""
    if k < 0:
        raise ValueError("k must be non-negative")
    prev, cur = 1, 0  # !0, !1
    if k == 0:
        return 1
    for i in range(2, k + 1):
        prev, cur = cur, (i - 1) * (cur + prev)
    return cur
