"""Gaussian circuit noise U -> sqrt(x) U + sqrt(1-x) Y.

The squared permanent of the rescaled submatrix Z = sqrt(M) U_{N,z} splits into
parts of fixed degree 2(N-k), each an eigenfunction of the noise with
eigenvalue x^(N-k).  :func:`degree_part` evaluates one such part by explicit
enumeration; the same routine evaluates marginal parts (``j < N`` columns),
which is what the sampler in :mod:`noisybs.marginal` needs.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import as_generator, ginibre, permanent_batch, permanent_ryser, submatrix
from .outcomes import is_collision_free, multiplicity, to_ordered

__all__ = [
    "GaussianNoiseSpec",
    "CutoffPolicy",
    "degree_part",
    "degree_parts",
    "term_count",
    "f_eval",
    "exact_prob",
    "exact_prob_general",
    "noisy_prob_analytic",
    "noisy_prob_decomposition",
    "noisy_prob_mc",
    "select_cutoff",
    "tvd_bound",
]


@dataclass(frozen=True)
class GaussianNoiseSpec:
    """Noise strength as a direct ``x`` or as ``x1 ** gamma``; ``1 - x`` is the noise rate."""

    x_direct: float | None = None
    x1: float | None = None
    gamma: int | None = None

    def __post_init__(self):
        if self.x_direct is not None:
            if self.x1 is not None or self.gamma is not None:
                raise ValueError("give either x or (x1, gamma), not both")
            if not 0.0 <= self.x_direct <= 1.0:
                raise ValueError(f"x={self.x_direct} outside [0, 1]")
        else:
            if self.x1 is None or self.gamma is None:
                raise ValueError("scaled noise needs both x1 and gamma")
            if not 0.0 <= self.x1 < 1.0:
                raise ValueError(f"x1={self.x1} outside [0, 1)")
            if int(self.gamma) != self.gamma or self.gamma < 1:
                raise ValueError("gamma must be a positive integer")

    @classmethod
    def direct(cls, x: float) -> "GaussianNoiseSpec":
        return cls(x_direct=float(x))

    @classmethod
    def scaled(cls, x1: float, gamma: int) -> "GaussianNoiseSpec":
        return cls(x1=float(x1), gamma=int(gamma))

    @property
    def x(self) -> float:
        if self.x_direct is not None:
            return self.x_direct
        return self.x1 ** self.gamma


@dataclass(frozen=True)
class CutoffPolicy:
    """Degree cutoff ``l``, optionally remembering the (eps, delta) target it came from."""

    l: int
    eps: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("cutoff must be non-negative")

    @classmethod
    def from_target(cls, n: int, x: float, eps: float, delta: float) -> "CutoffPolicy":
        return cls(select_cutoff(n, x, eps, delta), eps, delta)


def _as_stack(a: np.ndarray) -> tuple[np.ndarray, tuple]:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2:
        raise ValueError("expected a matrix or a stack of matrices")
    lead = a.shape[:-2]
    return a.reshape((-1,) + a.shape[-2:]), lead


def _pair_tensor(stack: np.ndarray) -> np.ndarray:
    """W[a, b, i, :] = z_{a,i} z*_{b,i} - [a == b]   (h2 on the diagonal)."""
    n = stack.shape[1]
    w = stack[:, :, None, :] * stack.conj()[:, None, :, :]
    idx = np.arange(n)
    w[:, idx, idx, :] -= 1.0
    return np.ascontiguousarray(np.moveaxis(w, 0, -1))


def term_count(n: int, j: int, k: int) -> int:
    """Number of enumerated terms in the degree-2(j-k) part with ``j`` columns."""
    d = j - k
    return math.comb(j, k) * math.comb(n, d) * math.factorial(d) ** 2


def _part_from_tensor(w: np.ndarray, n: int, j: int, k: int) -> np.ndarray:
    if not 0 <= k <= j <= n:
        raise ValueError(f"need 0 <= k <= j <= N, got k={k}, j={j}, N={n}")
    d = j - k
    batch = w.shape[-1]
    total = np.zeros(batch, dtype=complex)
    if d == 0:
        total += 1.0
    else:
        # R (size k) is the complement of `rest`; the term only depends on rest.
        for rest in itertools.combinations(range(j), d):
            for image in itertools.combinations(range(n), d):
                perms = list(itertools.permutations(image))
                for s in perms:
                    for t in perms:
                        term = w[s[0], t[0], rest[0]]
                        for a, b, i in zip(s[1:], t[1:], rest[1:]):
                            term = term * w[a, b, i]
                        total += term
    # k! orderings of R -> R', and C(N - d, k) choices of R' disjoint from K'.
    return math.factorial(k) * math.comb(n - d, k) * total


def degree_part(zcols: np.ndarray, k: int, n: int | None = None) -> np.ndarray | complex:
    """Degree-2(j-k) part for an N x j block of rescaled amplitudes.

    ``zcols`` holds the input rows (length N) against the ``j`` selected
    output columns; a leading batch shape is allowed.  With ``j == N`` this is
    the full-probability part; with ``j < N`` it is the marginal part.
    """
    stack, lead = _as_stack(zcols)
    n = stack.shape[1] if n is None else n
    if stack.shape[1] != n:
        raise ValueError(f"expected {n} rows, got {stack.shape[1]}")
    j = stack.shape[2]
    out = _part_from_tensor(_pair_tensor(stack), n, j, k).reshape(lead)
    return complex(out) if lead == () else out


def degree_parts(zcols: np.ndarray, ks: Sequence[int] | None = None) -> np.ndarray:
    """Stack of degree parts, shape (len(ks),) + batch shape.

    ``ks`` defaults to ``0..j``.  The pair tensor is built once and shared.
    """
    stack, lead = _as_stack(zcols)
    n, j = stack.shape[1], stack.shape[2]
    ks = range(j + 1) if ks is None else ks
    w = _pair_tensor(stack)
    return np.stack([_part_from_tensor(w, n, j, k).reshape(lead) for k in ks])


def f_eval(z: np.ndarray, k: int) -> complex | np.ndarray:
    """Degree-2(N-k) part of |Per Z|^2 for a square Z (or a stack of them)."""
    z = np.asarray(z, dtype=complex)
    if z.ndim < 2 or z.shape[-1] != z.shape[-2]:
        raise ValueError("f_eval needs square matrices")
    if not 0 <= k <= z.shape[-1]:
        raise ValueError(f"k={k} outside [0, {z.shape[-1]}]")
    return degree_part(z, k)


def _ordered(unitary: np.ndarray, z: Sequence[int]) -> tuple[np.ndarray, tuple]:
    u = np.asarray(unitary, dtype=complex)
    zz = to_ordered(z, u.shape[0])
    if len(zz) > u.shape[0]:
        raise ValueError("more photons than modes")
    return u, zz


def exact_prob(unitary: np.ndarray, z: Sequence[int]) -> float:
    """|Per U_{N,z}|^2 for a collision-free ordered outcome."""
    u, zz = _ordered(unitary, z)
    if not is_collision_free(zz):
        raise ValueError("exact_prob is for collision-free outcomes; use exact_prob_general")
    n = len(zz)
    return abs(permanent_ryser(submatrix(u, range(n), zz))) ** 2


def exact_prob_general(unitary: np.ndarray, z: Sequence[int]) -> float:
    """Noiseless probability of an ordered outcome, collisions allowed: |Per|^2 / prod m_i!."""
    u, zz = _ordered(unitary, z)
    n = len(zz)
    val = abs(permanent_ryser(submatrix(u, range(n), zz))) ** 2
    return val * multiplicity(zz) / math.factorial(n)


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    return x


def noisy_prob_analytic(unitary: np.ndarray, z: Sequence[int], x: float) -> float:
    """Exact average of |Per(sqrt(x) U + sqrt(1-x) Y)_{N,z}|^2 over Gaussian Y.

    Rows of U outside a chosen k-subset K pair up with Y entries, which only
    survive when matched; what remains is |Per U_{K,K'}|^2 over k-subsets of
    input rows and output columns.
    """
    x = _check_x(x)
    u, zz = _ordered(unitary, z)
    if not is_collision_free(zz):
        raise ValueError("noisy_prob_analytic is for collision-free outcomes")
    n, m = len(zz), u.shape[0]
    total = 0.0
    for k in range(n + 1):
        weight = x ** k * (1.0 - x) ** (n - k)
        if weight == 0.0:
            continue
        acc = 0.0
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(zz, k):
                acc += abs(permanent_ryser(submatrix(u, rows, cols))) ** 2
        total += weight / m ** (n - k) * math.factorial(n - k) * acc
    return total


def noisy_prob_decomposition(unitary: np.ndarray, z: Sequence[int], x: float,
                             l: int | None = None) -> float:
    """(1/M^N) sum_k x^(N-k) f^{=2(N-k)}(sqrt(M) U_{N,z}), keeping degrees 2(N-k) <= 2l.

    With ``l=None`` (or ``l >= N``) this is the noisy probability itself;
    otherwise it is the low-degree approximation of it.
    """
    x = _check_x(x)
    u, zz = _ordered(unitary, z)
    n, m = len(zz), u.shape[0]
    l = n if l is None else min(int(l), n)
    if l < 0:
        raise ValueError("cutoff must be non-negative")
    zmat = math.sqrt(m) * submatrix(u, range(n), zz)
    ks = range(n - l, n + 1)
    parts = degree_parts(zmat, ks)
    val = sum(x ** (n - k) * parts[i] for i, k in enumerate(ks))
    return float(np.real(val)) / m ** n


def noisy_prob_mc(unitary: np.ndarray, z: Sequence[int], x: float, samples: int, rng,
                  chunk: int = 50_000) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the noisy probability."""
    x = _check_x(x)
    if samples < 2:
        raise ValueError("need at least two samples")
    u, zz = _ordered(unitary, z)
    n, m = len(zz), u.shape[0]
    gen = as_generator(rng)
    base = math.sqrt(x) * submatrix(u, range(n), zz)
    vals = []
    left = samples
    while left > 0:
        b = min(chunk, left)
        y = ginibre(b * n, n, 1.0 / m, gen).reshape(b, n, n)
        vals.append(np.abs(permanent_batch(base + math.sqrt(1.0 - x) * y)) ** 2)
        left -= b
    v = np.concatenate(vals)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def _cutoff(n: int, x: float, eps: float, delta: float, factor: float) -> int:
    if not (0 < eps and 0 < delta < 1):
        raise ValueError("need eps > 0 and 0 < delta < 1")
    x = _check_x(x)
    if x == 0.0:
        return 0
    if x == 1.0:
        return n
    bound = math.log(factor * 2.0 * math.sqrt(n) / (eps * math.sqrt(delta))) / math.log(1.0 / x) - 1.0
    l = max(0, math.ceil(bound - 1e-12))
    return min(l, n)


def select_cutoff(n: int, x: float, eps: float, delta: float) -> int:
    """Smallest l with 2 sqrt(N) x^(l+1) / sqrt(delta) <= eps, clamped to [0, N]."""
    return _cutoff(n, x, eps, delta, 1.0)


def tvd_bound(n: int, x: float, l: int, delta: float) -> float:
    """Bound on the 1-norm truncation error holding for a 1-delta fraction of Haar unitaries."""
    return 2.0 * math.sqrt(n) * x ** (l + 1) / math.sqrt(delta)
