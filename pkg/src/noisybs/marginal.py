"""Truncated marginals in first quantization and the sequential sampler.

The marginal of the low-degree distribution over the first ``j`` photon
positions is

    qbar(r_1..r_j) = (N-j)!/N! * M^-j * sum_{k=j-l}^{j} x^(j-k) g^{=2(j-k)}(r_1..r_j)

where ``g`` is :func:`noisybs.gaussian.degree_part` evaluated on the N x j block
of rescaled amplitudes.  Prefixes that repeat a mode get the leftover mass of
their parent, split evenly among the already-occupied modes, so the
marginals telescope exactly and the tree sums to one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gaussian import degree_parts
from .numerics import RngStream, as_generator, rescaled_input
from .outcomes import COLLISION, is_collision_free, to_ordered

__all__ = [
    "MarginalOracle",
    "SampleRecord",
    "g_eval",
    "qbar_marginal",
    "collision_oracle",
    "conditional_distribution",
    "draw_sample",
    "sample",
    "sample_many",
    "induced_distribution",
    "qbar_tree",
    "qbar_full",
    "distribution_tvd_ordered_vs_unordered",
]


def g_eval(zrows: np.ndarray, prefix: Sequence[int], k: int) -> complex:
    """Degree-2(j-k) marginal part for the modes in ``prefix`` (j = len(prefix))."""
    zrows = np.asarray(zrows, dtype=complex)
    prefix = [int(p) for p in prefix]
    if not 0 <= k <= len(prefix):
        raise ValueError(f"need 0 <= k <= j, got k={k}, j={len(prefix)}")
    return complex(degree_parts(zrows[:, prefix], [k])[0])


class MarginalOracle:
    """Evaluates truncated marginals for one circuit, noise level and cutoff.

    Values are cached on the sorted prefix (the marginal is symmetric in its
    arguments).  ``calls`` counts every requested marginal, cached or not.
    """

    def __init__(self, unitary: np.ndarray, n: int, x: float, l: int, *, cache: bool = True):
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"x={x} outside [0, 1]")
        if l < 0:
            raise ValueError("cutoff must be non-negative")
        self.zrows = rescaled_input(unitary, n)
        self.n = n
        self.m = self.zrows.shape[1]
        self.x = float(x)
        self.l = int(l)
        self.calls = 0
        self._cache: dict | None = {} if cache else None

    def _evaluate(self, prefixes: list[tuple]) -> np.ndarray:
        j = len(prefixes[0])
        n, m = self.n, self.m
        if j > n:
            raise ValueError(f"prefix longer than N={n}")
        if j == 0:
            return np.ones(len(prefixes))
        cols = np.array(prefixes, dtype=int)
        block = np.moveaxis(self.zrows[:, cols], 1, 0)  # (B, N, j)
        ks = range(max(0, j - self.l), j + 1)
        parts = degree_parts(block, ks)
        total = sum(self.x ** (j - k) * parts[i] for i, k in enumerate(ks))
        scale = math.factorial(n - j) / math.factorial(n) / float(m) ** j
        return scale * np.real(total)

    def marginals(self, prefixes: Sequence[Sequence[int]]) -> np.ndarray:
        """Batched :meth:`marginal` for prefixes of equal length."""
        keys = [tuple(int(v) for v in p) for p in prefixes]
        if not keys:
            return np.zeros(0)
        if len({len(k) for k in keys}) != 1:
            raise ValueError("batched prefixes must share a length")
        for key in keys:
            if not is_collision_free(key):
                raise ValueError(f"prefix {key} repeats a mode; use collision()")
            if any(not 0 <= v < self.m for v in key):
                raise ValueError(f"prefix {key} has a mode outside [0, {self.m})")
        self.calls += len(keys)
        if self._cache is None:
            return self._evaluate(keys)
        sorted_keys = [tuple(sorted(k)) for k in keys]
        missing = sorted({k for k in sorted_keys if k not in self._cache})
        if missing:
            for key, val in zip(missing, self._evaluate(missing)):
                self._cache[key] = float(val)
        return np.array([self._cache[k] for k in sorted_keys])

    def marginal(self, prefix: Sequence[int]) -> float:
        return float(self.marginals([prefix])[0])

    def raw(self, prefix: Sequence[int]) -> float:
        """Truncated polynomial evaluated as-is, repeated modes included."""
        key = tuple(int(v) for v in prefix)
        self.calls += 1
        return float(self._evaluate([key])[0])

    def collision(self, prefix: Sequence[int], *, raw: bool = False) -> float:
        """Value of a prefix whose only repeat is one mode occurring twice.

        The leftover ``qbar(base) - sum_{fresh r} qbar(base + r)`` is split
        equally over the ``len(base)`` occupied modes, where ``base`` is the
        prefix with the duplicate removed.  Any ordering of such a prefix
        gets the same value.
        """
        key = tuple(int(v) for v in prefix)
        if self.l < 1:
            raise ValueError("collision values need a cutoff l >= 1")
        base = tuple(dict.fromkeys(key))
        if len(base) != len(key) - 1:
            raise ValueError(f"prefix {key} must repeat exactly one mode exactly once")
        if raw:
            return self.raw(key)
        parent = self.marginal(base)
        fresh = [m for m in range(self.m) if m not in base]
        children = self.marginals([base + (m,) for m in fresh])
        return (parent - float(children.sum())) / len(base)

    def value(self, prefix: Sequence[int]) -> float:
        key = tuple(int(v) for v in prefix)
        if is_collision_free(key):
            return self.marginal(key)
        return self.collision(key)

    def children(self, prefix: Sequence[int], parent: float | None = None) -> np.ndarray:
        """Values of ``prefix + (r,)`` for every mode r (length-M array).

        Fresh modes get truncated marginals; occupied modes share the
        leftover of ``parent`` (the prefix's own value, recomputed if absent).
        """
        key = tuple(int(v) for v in prefix)
        if not is_collision_free(key):
            raise ValueError("children are defined for collision-free prefixes only")
        if len(key) >= self.n:
            raise ValueError("prefix already has N photons")
        fresh = [m for m in range(self.m) if m not in key]
        out = np.zeros(self.m)
        out[fresh] = self.marginals([key + (m,) for m in fresh])
        if key:
            if self.l < 1:
                raise ValueError("collision values need a cutoff l >= 1")
            if parent is None:
                parent = self.marginal(key) if key else 1.0
            out[list(key)] = (parent - out[fresh].sum()) / len(key)
        return out


def qbar_marginal(unitary: np.ndarray, n: int, prefix: Sequence[int], x: float, l: int) -> float:
    """Truncated marginal of a collision-free prefix."""
    return MarginalOracle(unitary, n, x, l, cache=False).marginal(prefix)


def collision_oracle(unitary: np.ndarray, n: int, prefix: Sequence[int], x: float, l: int,
                     *, raw: bool = False) -> float:
    return MarginalOracle(unitary, n, x, l, cache=False).collision(prefix, raw=raw)


def conditional_distribution(weights: np.ndarray, fresh: np.ndarray) -> tuple[np.ndarray, bool]:
    """Clamp negative weights to zero and renormalise.

    Falls back to uniform over ``fresh`` modes when nothing positive is left;
    the flag reports whether that happened.
    """
    w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
    total = w.sum()
    if total > 0.0:
        return w / total, False
    fresh = np.asarray(fresh, dtype=bool)
    return fresh / fresh.sum(), True


def _draw(probs: np.ndarray, u: float) -> int:
    # Category i owns [cum[i-1], cum[i]); zero-width intervals are never hit.
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u, side="right"))
    if idx >= probs.size:
        idx = int(np.flatnonzero(probs > 0)[-1])
    return idx


@dataclass
class SampleRecord:
    outcome: tuple | str
    steps: list = field(default_factory=list)
    oracle_calls: int = 0
    fallback: bool = False

    @property
    def is_collision(self) -> bool:
        return self.outcome == COLLISION

    @property
    def ordered(self) -> tuple | str:
        return self.outcome if self.is_collision else to_ordered(self.outcome)


def draw_sample(oracle: MarginalOracle, rng, *, audit: bool = False) -> SampleRecord:
    """Draw one outcome photon by photon; stop at the first repeated mode."""
    gen = as_generator(rng)
    start_calls = oracle.calls
    prefix: tuple = ()
    parent = 1.0
    steps = []
    used_fallback = False
    for step in range(1, oracle.n + 1):
        weights = oracle.children(prefix, parent)
        fresh = np.ones(oracle.m, dtype=bool)
        fresh[list(prefix)] = False
        probs, fell_back = conditional_distribution(weights, fresh)
        used_fallback |= fell_back
        mode = _draw(probs, gen.random())
        if audit:
            steps.append({
                "step": step,
                "prefix": list(prefix),
                "weights": weights.tolist(),
                "probabilities": probs.tolist(),
                "fallback": fell_back,
                "draw": mode,
            })
        if mode in prefix:
            return SampleRecord(COLLISION, steps, oracle.calls - start_calls, used_fallback)
        parent = float(weights[mode])
        prefix = prefix + (mode,)
    return SampleRecord(prefix, steps, oracle.calls - start_calls, used_fallback)


def sample(unitary: np.ndarray, n: int, x: float, l: int, rng, *, audit: bool = False) -> SampleRecord:
    if l < 1:
        raise ValueError("the sampler needs a cutoff l >= 1")
    return draw_sample(MarginalOracle(unitary, n, x, l), rng, audit=audit)


def sample_many(unitary: np.ndarray, n: int, x: float, l: int, count: int, seed: int,
                *, audit: bool = False) -> list[SampleRecord]:
    """``count`` samples; sample ``i`` uses ``RngStream(seed, i)``."""
    if l < 1:
        raise ValueError("the sampler needs a cutoff l >= 1")
    oracle = MarginalOracle(unitary, n, x, l)
    return [draw_sample(oracle, RngStream(seed, i), audit=audit) for i in range(count)]


def _walk(oracle: MarginalOracle, clamp: bool) -> dict:
    leaves: dict = {}
    stack = [((), 1.0, 1.0)]  # (prefix, sampler mass, qbar value)
    while stack:
        prefix, mass, value = stack.pop()
        if len(prefix) == oracle.n:
            leaves[prefix] = mass if clamp else value
            continue
        weights = oracle.children(prefix, value)
        fresh = np.ones(oracle.m, dtype=bool)
        fresh[list(prefix)] = False
        probs = conditional_distribution(weights, fresh)[0] if clamp else None
        for mode in range(oracle.m):
            child = prefix + (mode,)
            if mode in prefix:
                leaves[child] = mass * probs[mode] if clamp else float(weights[mode])
            else:
                stack.append((child, mass * probs[mode] if clamp else 0.0, float(weights[mode])))
    return leaves


def induced_distribution(oracle: MarginalOracle, *, aggregate: bool = True) -> dict:
    """Exact output law of :func:`draw_sample`, by walking the whole outcome tree.

    With ``aggregate`` the collision leaves are merged into :data:`COLLISION`;
    otherwise they are keyed by the prefix at which the first repeat occurs.
    """
    leaves = _walk(oracle, clamp=True)
    if not aggregate:
        return leaves
    out: dict = {}
    coll = 0.0
    for key, val in leaves.items():
        if is_collision_free(key):
            out[key] = val
        else:
            coll += val
    out[COLLISION] = coll
    return out


def qbar_tree(oracle: MarginalOracle) -> dict:
    """Leaves of the quasi-probability tree: full collision-free prefixes and first-collision prefixes."""
    return _walk(oracle, clamp=False)


def qbar_full(oracle: MarginalOracle, r: Sequence[int]) -> float:
    """Quasi-probability of any r in [M]^N.

    Outcomes past their first collision share that collision prefix's value
    uniformly over the remaining positions.
    """
    key = tuple(int(v) for v in r)
    if len(key) != oracle.n:
        raise ValueError(f"outcome must have N={oracle.n} entries")
    seen: set = set()
    for pos, v in enumerate(key):
        if v in seen:
            return oracle.collision(key[: pos + 1]) / float(oracle.m) ** (oracle.n - pos - 1)
        seen.add(v)
    return oracle.marginal(key)


def distribution_tvd_ordered_vs_unordered(p_r: dict, q_r: dict, tol: float = 1e-9) -> float:
    """1-norm distance computed over unordered and over ordered outcomes.

    Both inputs map r-tuples to probabilities and must be symmetric under
    permutations of r; the two distances then agree, and their common value is
    returned.
    """
    for dist in (p_r, q_r):
        groups: dict = {}
        for key, val in dist.items():
            if key != COLLISION:
                groups.setdefault(to_ordered(key), []).append(val)
        for zkey, vals in groups.items():
            if max(vals) - min(vals) > tol:
                raise ValueError(f"distribution is not permutation symmetric at {zkey}")
    keys = set(p_r) | set(q_r)
    unordered = sum(abs(p_r.get(k, 0.0) - q_r.get(k, 0.0)) for k in keys)
    p_z: dict = {}
    q_z: dict = {}
    for src, dst in ((p_r, p_z), (q_r, q_z)):
        for key, val in src.items():
            zkey = key if key == COLLISION else to_ordered(key)
            dst[zkey] = dst.get(zkey, 0.0) + val
    ordered = sum(abs(p_z.get(k, 0.0) - q_z.get(k, 0.0)) for k in set(p_z) | set(q_z))
    if abs(ordered - unordered) > tol:
        raise ValueError(f"ordered and unordered distances differ: {ordered} vs {unordered}")
    return unordered
