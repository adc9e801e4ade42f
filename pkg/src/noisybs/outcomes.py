"""Outcome encodings.

``r``  unordered: mode of each photon, length N, repeats mean a collision.
``z``  ordered: the sorted ``r``.
``m``  occupation: photon count per output mode, length M.

Collision outcomes are lumped together under :data:`COLLISION` when a
distribution is restricted to the collision-free sector.
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

__all__ = [
    "COLLISION",
    "is_collision_free",
    "to_ordered",
    "to_occupation",
    "from_occupation",
    "outcome_convert",
    "multiplicity",
    "parse_outcome",
    "format_outcome",
]

COLLISION = "c"


def _check_modes(seq: Sequence[int], m: int | None) -> tuple:
    out = tuple(int(v) for v in seq)
    for v in out:
        if v < 0 or (m is not None and v >= m):
            raise ValueError(f"mode index {v} out of range")
    return out


def is_collision_free(r: Sequence[int]) -> bool:
    return len(set(r)) == len(r)


def to_ordered(r: Sequence[int], m: int | None = None) -> tuple:
    return tuple(sorted(_check_modes(r, m)))


def to_occupation(z: Sequence[int], m: int) -> tuple:
    z = _check_modes(z, m)
    counts = [0] * m
    for v in z:
        counts[v] += 1
    return tuple(counts)


def from_occupation(counts: Sequence[int], n: int | None = None) -> tuple:
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ValueError("occupation numbers must be non-negative")
    if n is not None and sum(counts) != n:
        raise ValueError(f"occupation sums to {sum(counts)}, expected {n}")
    return tuple(mode for mode, c in enumerate(counts) for _ in range(c))


def outcome_convert(outcome: Sequence[int], source: str, target: str, *, m: int | None = None,
                    n: int | None = None) -> tuple:
    """Convert between the ``"r"``, ``"z"`` and ``"m"`` encodings.

    ``z -> r`` returns the sorted representative.  Converting to ``"m"``
    requires the mode count ``m``.
    """
    if source not in ("r", "z", "m") or target not in ("r", "z", "m"):
        raise ValueError("encodings are 'r', 'z' or 'm'")
    if source == "m":
        z = from_occupation(outcome, n)
        if m is not None and len(outcome) != m:
            raise ValueError(f"occupation vector has length {len(outcome)}, expected {m}")
    else:
        z = to_ordered(outcome, m)
        if source == "z" and tuple(outcome) != z:
            raise ValueError("ordered outcome must be nondecreasing")
        if n is not None and len(z) != n:
            raise ValueError(f"outcome has {len(z)} photons, expected {n}")
    if target == "m":
        if m is None:
            if source == "m":
                return tuple(int(c) for c in outcome)
            raise ValueError("target 'm' needs the mode count m")
        return to_occupation(z, m)
    return z


def multiplicity(z: Sequence[int]) -> int:
    """Number of distinct orderings of ``z``: N! / prod(m_i!)."""
    out = math.factorial(len(z))
    for c in Counter(z).values():
        out //= math.factorial(c)
    return out


def parse_outcome(text: str) -> tuple:
    """Parse ``"1 2 4"`` (spaces or commas) into a tuple of ints."""
    parts = text.replace(",", " ").split()
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"malformed outcome string {text!r}") from None


def format_outcome(key) -> str:
    if key == COLLISION:
        return COLLISION
    return " ".join(str(int(v)) for v in key)
