"""Matrix primitives: Haar unitaries, Ginibre draws, permanents, RNG streams."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "RngStream",
    "as_generator",
    "haar_unitary",
    "ginibre",
    "rescaled_input",
    "permanent_naive",
    "permanent_ryser",
    "permanent_batch",
    "submatrix",
    "matrix_to_json",
    "matrix_from_json",
    "save_matrix",
    "load_matrix",
]

NAIVE_MAX_N = 9


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, index)``.

    Streams with different indices are derived through
    :class:`numpy.random.SeedSequence` spawn keys, so they are statistically
    independent while remaining a pure function of the pair.
    """

    seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def ginibre(rows: int, cols: int, variance: float, rng) -> np.ndarray:
    """Complex Gaussian matrix with iid entries, E[z] = 0 and E[|z|^2] = variance.

    Real and imaginary parts each carry ``variance / 2``, so for unit variance
    E[|z|^4] = 2.
    """
    if rows < 0 or cols < 0:
        raise ValueError(f"invalid dimensions {rows}x{cols}")
    if not variance > 0:
        raise ValueError("variance must be positive")
    gen = as_generator(rng)
    scale = math.sqrt(variance / 2.0)
    re = gen.standard_normal((rows, cols))
    im = gen.standard_normal((rows, cols))
    return scale * (re + 1j * im)


def haar_unitary(m: int, rng) -> np.ndarray:
    """Haar-random M x M unitary via QR of a Ginibre matrix.

    The phases of the triangular factor's diagonal are absorbed into Q so
    that R has a real positive diagonal; this makes the decomposition unique
    and the resulting Q Haar distributed.
    """
    if m < 1:
        raise ValueError(f"invalid dimension M={m}")
    g = ginibre(m, m, 1.0, rng)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def rescaled_input(unitary: np.ndarray, n: int) -> np.ndarray:
    """Return sqrt(M) times the first ``n`` rows of ``unitary`` (an n x M array)."""
    u = np.asarray(unitary, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be square")
    if not 0 <= n <= u.shape[0]:
        raise ValueError(f"photon number {n} outside [0, {u.shape[0]}]")
    return math.sqrt(u.shape[0]) * u[:n, :]


def _check_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    return a


def permanent_naive(a) -> complex:
    """Permanent by direct enumeration of S_n (n <= 9)."""
    a = _check_square(a)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise ValueError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    rows = a.tolist()
    total = 0j
    for perm in itertools.permutations(range(n)):
        p = 1 + 0j
        for col, row in enumerate(perm):
            p *= rows[row][col]
        total += p
    return complex(total)


def permanent_ryser(a) -> complex:
    """Permanent via Ryser's inclusion-exclusion formula in Gray-code order.

    Each step toggles one column in the running row sums, so the cost is
    O(2^n * n).  The 0 x 0 permanent is 1.
    """
    a = _check_square(a)
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    cols = a.T.tolist()
    sums = [0j] * n
    total = 0j
    gray = 0
    for step in range(1, 1 << n):
        bit = (step & -step).bit_length() - 1
        gray ^= 1 << bit
        col = cols[bit]
        if gray >> bit & 1:
            for i in range(n):
                sums[i] += col[i]
        else:
            for i in range(n):
                sums[i] -= col[i]
        p = 1 + 0j
        for s in sums:
            p *= s
        if bin(gray).count("1") & 1:
            total -= p
        else:
            total += p
    return complex(total * (-1) ** n)


def permanent_batch(a: np.ndarray) -> np.ndarray:
    """Ryser permanents of a stack of square matrices, shape (..., n, n)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected (..., n, n), got {a.shape}")
    n = a.shape[-1]
    lead = a.shape[:-2]
    if n == 0:
        return np.ones(lead, dtype=complex)
    flat = a.reshape(-1, n, n)
    sums = np.zeros((flat.shape[0], n), dtype=complex)
    total = np.zeros(flat.shape[0], dtype=complex)
    gray = 0
    for step in range(1, 1 << n):
        bit = (step & -step).bit_length() - 1
        gray ^= 1 << bit
        if gray >> bit & 1:
            sums += flat[:, :, bit]
        else:
            sums -= flat[:, :, bit]
        sign = -1.0 if bin(gray).count("1") & 1 else 1.0
        total += sign * np.prod(sums, axis=1)
    return (total * (-1) ** n).reshape(lead)


def submatrix(a: np.ndarray, row_idx: Sequence[int], col_idx: Sequence[int]) -> np.ndarray:
    """Entry (i, j) of the result is ``a[row_idx[i], col_idx[j]]``; repeats allowed."""
    a = np.asarray(a)
    rows = [int(i) for i in row_idx]
    cols = [int(j) for j in col_idx]
    for i in rows:
        if not 0 <= i < a.shape[0]:
            raise IndexError(f"row index {i} out of range for {a.shape[0]} rows")
    for j in cols:
        if not 0 <= j < a.shape[1]:
            raise IndexError(f"column index {j} out of range for {a.shape[1]} columns")
    return a[np.ix_(rows, cols)] if rows and cols else np.zeros((len(rows), len(cols)), dtype=a.dtype)


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("only 2-d matrices can be serialized")
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    arr = np.array([complex(re, im) for re, im in data], dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def save_matrix(path, a: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(a), fh)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))
