"""Property tests for the invariants the library relies on."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from noisybs.combinatorics import agreement_set, bijections, derangements, subsets
from noisybs.gaussian import degree_parts, noisy_prob_analytic, noisy_prob_decomposition, select_cutoff, tvd_bound
from noisybs.loss import discarded_mass, lossy_prob, lossy_truncated, truncated_prefactor
from noisybs.marginal import MarginalOracle, conditional_distribution
from noisybs.numerics import RngStream, haar_unitary, permanent_naive, permanent_ryser
from noisybs.outcomes import from_occupation, outcome_convert, to_occupation
from noisybs.validation import tvd

seeds = st.integers(0, 2 ** 32 - 1)
finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def complex_matrix(n):
    return st.lists(st.tuples(finite, finite), min_size=n * n, max_size=n * n).map(
        lambda pairs: np.array([complex(a, b) for a, b in pairs]).reshape(n, n))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(complex_matrix))
def test_ryser_equals_naive(a):
    ref = permanent_naive(a)
    assert abs(permanent_ryser(a) - ref) <= 1e-10 * max(1.0, np.abs(a).max() ** a.shape[0] * math.factorial(a.shape[0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(complex_matrix))
def test_parts_sum_to_squared_permanent(z):
    total = degree_parts(z).sum()
    exact = abs(permanent_ryser(z)) ** 2
    scale = max(1.0, (np.abs(z).max() ** 2) ** z.shape[0] * math.factorial(z.shape[0]) ** 2)
    assert abs(total - exact) <= 1e-9 * scale


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 4), st.floats(0, 1))
def test_decomposition_equals_analytic(seed, n, x):
    u = haar_unitary(n + 3, RngStream(seed))
    z = tuple(range(1, n + 1))
    a = noisy_prob_analytic(u, z, x)
    assert abs(noisy_prob_decomposition(u, z, x) - a) <= 1e-9 * max(a, 1e-300) + 1e-15


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.floats(0, 1), st.integers(0, 3))
def test_telescoping(seed, l, x, j):
    n, m = 4, 7
    u = haar_unitary(m, RngStream(seed))
    oracle = MarginalOracle(u, n, x, l, cache=False)
    prefix = tuple(int(v) for v in RngStream(seed, 1).generator().choice(m, size=j, replace=False))
    total = sum(oracle.raw(prefix + (r,)) for r in range(m))
    assert abs(total - oracle.marginal(prefix)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.floats(0, 1), st.permutations([0, 2, 3]))
def test_marginal_symmetry(seed, l, x, perm):
    u = haar_unitary(5, RngStream(seed))
    oracle = MarginalOracle(u, 3, x, l, cache=False)
    assert abs(oracle.marginal(tuple(perm)) - oracle.marginal((0, 2, 3))) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0, 1))
def test_full_degree_marginal_is_exact(seed, x):
    u = haar_unitary(6, RngStream(seed))
    oracle = MarginalOracle(u, 3, x, 3)
    assert abs(oracle.marginal((0, 4, 5)) - noisy_prob_analytic(u, (0, 4, 5), x) / 6) <= 1e-9


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=12))
def test_conditional_is_a_distribution(weights):
    w = np.array(weights)
    fresh = np.ones(w.size, bool)
    fresh[0] = w.size == 1
    probs, fell_back = conditional_distribution(w, fresh)
    assert np.all(probs >= 0)
    assert abs(probs.sum() - 1.0) < 1e-12
    assert fell_back == (not np.any(w > 0))


dists = st.dictionaries(st.integers(0, 6), st.floats(0, 1, allow_nan=False), min_size=1)


@given(dists, dists, dists)
def test_tvd_metric(p, q, r):
    assert tvd(p, q) >= 0
    assert abs(tvd(p, q) - tvd(q, p)) < 1e-12
    assert tvd(p, p) == 0
    assert tvd(p, r) <= tvd(p, q) + tvd(q, r) + 1e-12


@given(st.integers(1, 6), st.lists(st.integers(0, 5), min_size=0, max_size=6))
def test_outcome_round_trips(m, r):
    r = [v % m for v in r]
    z = outcome_convert(r, "r", "z", m=m)
    occ = outcome_convert(z, "z", "m", m=m)
    assert sum(occ) == len(r)
    assert outcome_convert(occ, "m", "z", m=m) == z
    assert from_occupation(to_occupation(z, m)) == z


@given(st.integers(0, 9), st.integers(0, 9))
def test_subset_counts(n, k):
    assert sum(1 for _ in subsets(n, k)) == (math.comb(n, k) if k <= n else 0)


@given(st.integers(2, 12))
def test_derangement_recurrence(k):
    assert derangements(k) == (k - 1) * (derangements(k - 1) + derangements(k - 2))


@given(st.integers(0, 4))
def test_disjoint_bijection_pairs(k):
    dom = tuple(range(k))
    maps = list(bijections(dom, dom))
    assert sum(agreement_set(f, g) == () for f in maps for g in maps) == math.factorial(k) * derangements(k)


@given(st.integers(1, 40), st.floats(0.01, 0.99), st.floats(1e-4, 10), st.floats(1e-3, 0.99))
def test_cutoff_meets_bound(n, x, eps, delta):
    l = select_cutoff(n, x, eps, delta)
    assert 0 <= l <= n
    if l < n:
        assert tvd_bound(n, x, l, delta) <= eps * (1 + 1e-9)
    if l > 0:
        assert tvd_bound(n, x, l - 1, delta) > eps * (1 - 1e-9)


@given(st.integers(1, 12), st.floats(0, 1), st.data())
def test_truncated_prefactor_closes_at_full_degree(n, eta, data):
    k = data.draw(st.integers(0, n))
    assert abs(truncated_prefactor(n, k, eta, n) - eta ** k * (1 - eta) ** (n - k)) < 1e-9
    l = data.draw(st.integers(0, n))
    assert abs(discarded_mass(n, eta, l) + sum(math.comb(n, j) * eta ** j * (1 - eta) ** (n - j)
                                               for j in range(l + 1)) - 1.0) < 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(0, 1), st.lists(st.integers(0, 5), max_size=3))
def test_lossy_full_degree_truncation_is_exact(seed, eta, r):
    u = haar_unitary(6, RngStream(seed))
    assert abs(lossy_truncated(u, 3, r, eta, 3) - lossy_prob(u, 3, r, eta)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 6))
def test_haar_rows_orthonormal(seed, n):
    m = 2 * n + 1
    u = haar_unitary(m, RngStream(seed))
    assert np.max(np.abs(u @ u.conj().T - np.eye(m))) < 1e-9
