"""Uniform photon loss with transmission eta, applied before the circuit.

Loss splits the state into photon-number sectors with binomial weights.
Truncating at degree ``l`` in eta removes every sector with more than ``l``
surviving photons, so the discarded mass is a binomial tail that stays
large unless l is close to eta*N.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import permanent_ryser, submatrix

__all__ = [
    "LossSpec",
    "lossy_prob",
    "lossy_truncated",
    "truncated_prefactor",
    "sector_mass",
    "discarded_mass",
    "loss_barrier_report",
]


@dataclass(frozen=True)
class LossSpec:
    """Transmission given directly, or as ``eta1 ** depth``."""

    eta_direct: float | None = None
    eta1: float | None = None
    depth: int | None = None

    def __post_init__(self):
        if self.eta_direct is not None:
            if self.eta1 is not None or self.depth is not None:
                raise ValueError("give either eta or (eta1, depth), not both")
            if not 0.0 <= self.eta_direct <= 1.0:
                raise ValueError(f"eta={self.eta_direct} outside [0, 1]")
        else:
            if self.eta1 is None or self.depth is None:
                raise ValueError("per-layer loss needs eta1 and depth")
            if not 0.0 < self.eta1 <= 1.0:
                raise ValueError(f"eta1={self.eta1} outside (0, 1]")
            if self.depth < 0:
                raise ValueError("depth must be non-negative")

    @property
    def eta(self) -> float:
        if self.eta_direct is not None:
            return self.eta_direct
        return self.eta1 ** self.depth


def _perm_sum(u: np.ndarray, n: int, r: tuple) -> float:
    k = len(r)
    return sum(abs(permanent_ryser(submatrix(u, rows, r))) ** 2
               for rows in itertools.combinations(range(n), k))


def _check(unitary, n, r, eta):
    u = np.asarray(unitary, dtype=complex)
    r = tuple(int(v) for v in r)
    if len(r) > n:
        raise ValueError(f"{len(r)} clicks from {n} photons")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    if any(not 0 <= v < u.shape[0] for v in r):
        raise ValueError("mode index out of range")
    return u, r


def lossy_prob(unitary: np.ndarray, n: int, r: Sequence[int], eta: float) -> float:
    """Probability of the unordered k-photon outcome ``r`` (first quantization).

    eta^k (1-eta)^(N-k) / k! * sum_{|T|=k} |Per U_{T,r}|^2.  Repeated modes are
    allowed; summing over all of [M]^k gives the sector weight.
    """
    u, r = _check(unitary, n, r, eta)
    k = len(r)
    return eta ** k * (1.0 - eta) ** (n - k) / math.factorial(k) * _perm_sum(u, n, r)


def truncated_prefactor(n: int, k: int, eta: float, l: int) -> float:
    """eta^k sum_{j=0}^{l-k} C(N-k, j) (-eta)^j, the low-degree part of eta^k (1-eta)^(N-k)."""
    if k > l:
        return 0.0
    return eta ** k * sum(math.comb(n - k, j) * (-eta) ** j for j in range(min(l, n) - k + 1))


def lossy_truncated(unitary: np.ndarray, n: int, r: Sequence[int], eta: float, l: int) -> float:
    """Degree-``l`` truncation in eta of :func:`lossy_prob`; zero when r has more than l photons."""
    u, r = _check(unitary, n, r, eta)
    k = len(r)
    if k > l:
        return 0.0
    return truncated_prefactor(n, k, eta, l) / math.factorial(k) * _perm_sum(u, n, r)


def sector_mass(n: int, k: int, eta: float) -> float:
    return math.comb(n, k) * eta ** k * (1.0 - eta) ** (n - k)


def discarded_mass(n: int, eta: float, l: int) -> float:
    return sum(sector_mass(n, k, eta) for k in range(l + 1, n + 1))


def loss_barrier_report(n: int, eta: float, l: int, target: float = 0.01) -> dict:
    """Discarded binomial mass at cutoff ``l`` and the smallest cutoff meeting ``target``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    if not 0 <= l <= n:
        raise ValueError(f"l={l} outside [0, {n}]")
    required = next(c for c in range(n + 1) if discarded_mass(n, eta, c) <= target)
    return {
        "N": n,
        "eta": eta,
        "l": l,
        "discarded_mass": discarded_mass(n, eta, l),
        "required_l": required,
        "target": target,
        "mean_photons": eta * n,
        "std_photons": math.sqrt(n * eta * (1.0 - eta)),
    }
