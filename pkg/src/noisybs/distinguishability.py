"""Partial distinguishability: every non-agreeing (sigma, rho) position costs a factor x.

The decomposition here uses the basis 1, h1(z) = |z|^2, h2(z, z') = z z'*,
with h1 carrying degree 0.  Exact evaluation is brute force and meant for
desk-scale N; the term counts reported by :func:`barrier_report` show why no
efficient truncated evaluator follows from this expansion.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinatorics import derangements
from .gaussian import _cutoff
from .numerics import as_generator, permanent_ryser, submatrix
from .outcomes import multiplicity, to_ordered

__all__ = [
    "DistinguishabilitySpec",
    "dist_prob_exact",
    "f_dist_eval",
    "dist_norm_formula",
    "dist_cutoff",
    "distinguishable_sampler",
    "distinguishable_prob",
    "barrier_report",
    "barrier_table",
]

EXACT_MAX_N = 7


@dataclass(frozen=True)
class DistinguishabilitySpec:
    """``x = 1`` fully indistinguishable, ``x = 0`` fully distinguishable."""

    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"x={self.x} outside [0, 1]")


def dist_prob_exact(unitary: np.ndarray, z: Sequence[int], x: float) -> float:
    """Probability of ordered outcome ``z`` with pairwise overlap ``x``, by summing over S_N x S_N.

    Collision outcomes carry the usual 1 / prod(m_i!) factor.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    u = np.asarray(unitary, dtype=complex)
    zz = to_ordered(z, u.shape[0])
    n = len(zz)
    if n > EXACT_MAX_N:
        raise ValueError(f"brute force limited to N <= {EXACT_MAX_N}")
    a = submatrix(u, range(n), zz).T.tolist()  # a[i][row] = U[row, z_i]
    perms = list(itertools.permutations(range(n)))
    total = 0j
    for s in perms:
        amp = [a[i][s[i]] for i in range(n)]
        for t in perms:
            agree = 0
            p = 1 + 0j
            for i in range(n):
                if s[i] == t[i]:
                    agree += 1
                p *= amp[i] * a[i][t[i]].conjugate()
            total += x ** (n - agree) * p
    return float(total.real) * multiplicity(zz) / math.factorial(n)


def _h1h2_terms(w: np.ndarray, n: int, k: int) -> np.ndarray:
    # w[a, b, i, :] = z_{a,i} z*_{b,i}
    total = np.zeros(w.shape[-1], dtype=complex)
    for cols in itertools.combinations(range(n), k):          # T: columns with h1
        rest = [i for i in range(n) if i not in cols]
        for rows in itertools.combinations(range(n), k):      # T': their rows
            others = [a for a in range(n) if a not in rows]
            h1_sum = np.zeros_like(total)
            for sigma in itertools.permutations(rows):
                term = np.ones_like(total)
                for a, i in zip(sigma, cols):
                    term = term * w[a, a, i]
                h1_sum += term
            h2_sum = np.zeros_like(total)
            for s in itertools.permutations(others):
                for t in itertools.permutations(others):
                    if any(p == q for p, q in zip(s, t)):
                        continue
                    term = np.ones_like(total)
                    for a, b, i in zip(s, t, rest):
                        term = term * w[a, b, i]
                    h2_sum += term
            total += h1_sum * h2_sum
    return total


def f_dist_eval(z: np.ndarray, k: int) -> complex | np.ndarray:
    """Degree-(N-k) part of |Per Z|^2 in the {1, h1, h2} basis (k = agreeing positions).

    Accepts one square matrix or a stack of shape (..., N, N).
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim < 2 or z.shape[-1] != z.shape[-2]:
        raise ValueError("f_dist_eval needs square matrices")
    n = z.shape[-1]
    if n > EXACT_MAX_N:
        raise ValueError(f"brute force limited to N <= {EXACT_MAX_N}")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    lead = z.shape[:-2]
    stack = z.reshape((-1, n, n))
    w = np.moveaxis(stack[:, :, None, :] * stack.conj()[:, None, :, :], 0, -1)
    out = _h1h2_terms(np.ascontiguousarray(w), n, k).reshape(lead)
    return complex(out) if lead == () else out


def dist_norm_formula(n: int, k: int) -> float:
    """Closed-form E_Z |f^{=(N-k)}|^2 over standard complex Gaussian Z (exact integer)."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    inner = sum(
        math.comb(k, j) ** 2 * math.factorial(j) * math.factorial(k - j) * derangements(k - j) * 2 ** j
        for j in range(k + 1)
    )
    return float(math.comb(n, k) ** 2 * math.factorial(n - k) * derangements(n - k) * inner)


def dist_cutoff(n: int, x: float, eps: float, delta: float) -> int:
    """Cutoff for the distinguishability expansion; the bound carries an extra factor e."""
    return _cutoff(n, x, eps, delta, math.e)


def distinguishable_sampler(unitary: np.ndarray, n: int, rng) -> tuple:
    """Fully distinguishable photons: photon i lands in mode r with probability |U_{i,r}|^2."""
    u = np.asarray(unitary, dtype=complex)
    gen = as_generator(rng)
    probs = np.abs(u[:n, :]) ** 2
    probs /= probs.sum(axis=1, keepdims=True)
    return tuple(int(gen.choice(u.shape[0], p=row)) for row in probs)


def distinguishable_prob(unitary: np.ndarray, z: Sequence[int]) -> float:
    """Per(|U_{N,z}|^2) / prod(m_i!): ordered-outcome law of the distinguishable sampler."""
    u = np.asarray(unitary, dtype=complex)
    zz = to_ordered(z, u.shape[0])
    n = len(zz)
    per = permanent_ryser(np.abs(submatrix(u, range(n), zz)) ** 2).real
    return per * multiplicity(zz) / math.factorial(n)


def barrier_report(n: int, k: int) -> int:
    """Number of summands in f^{=(N-k)}: C(N,k)^2 k! (N-k)! !(N-k)."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    return math.comb(n, k) ** 2 * math.factorial(k) * math.factorial(n - k) * derangements(n - k)


def barrier_table(n_max: int = 10) -> list[dict]:
    rows = []
    for n in range(1, n_max + 1):
        for k in range(n + 1):
            count = barrier_report(n, k)
            rows.append({
                "N": n,
                "k": k,
                "summands": count,
                "n_factorial": math.factorial(n),
                "at_least_n_factorial": count >= math.factorial(n),
                "vanishing": count == 0,
            })
    return rows
