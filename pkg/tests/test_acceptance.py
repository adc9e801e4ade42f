"""Acceptance criteria, each at its stated tolerance and runtime.

Each test records one ``PASS``/``FAIL`` line, printed in the terminal
summary and to stdout.
"""
import itertools
import json
import math
import time

import numpy as np
import pytest

from noisybs import cli
from noisybs.gaussian import noisy_prob_analytic, noisy_prob_decomposition, noisy_prob_mc
from noisybs.marginal import MarginalOracle, qbar_full, qbar_tree
from noisybs.numerics import RngStream, haar_unitary, save_matrix
from noisybs.validation import (
    band_test,
    bench_marginal,
    check_decay,
    check_decomposition,
    check_dist_barrier,
    check_loss_barrier,
    check_orthogonality,
    check_telescoping,
    dist_anchors,
    dist_decomposition_error,
    exact_bs_distribution,
    sample_many,
    sampler_gap_check,
    time_single_marginal,
)


@pytest.fixture
def record(acceptance_log):
    def _record(label, ok, detail):
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'} - {detail}"
        acceptance_log.append(line)
        print(line)
        return ok
    return _record


def test_criterion_1_decomposition(record):
    t0 = time.perf_counter()
    rep = check_decomposition(count=100, n_values=(2, 3, 4, 5), seed=0, ryser_max=9)
    elapsed = time.perf_counter() - t0
    dec = max(rep["metrics"]["decomposition_max_rel_error"].values())
    rys = max(rep["metrics"]["ryser_max_rel_error"].values())
    ok = dec <= 1e-9 and rys <= 1e-10 and elapsed < 60
    record(1, ok, f"decomposition rel err {dec:.2e}, Ryser vs naive {rys:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_noisy_probability_triangle(record):
    t0 = time.perf_counter()
    u = haar_unitary(20, RngStream(2024))
    z = (2, 9, 15)
    worst_rel, worst_z = 0.0, 0.0
    for i, x in enumerate((0.2, 0.5, 0.8)):
        a = noisy_prob_analytic(u, z, x)
        worst_rel = max(worst_rel, abs(noisy_prob_decomposition(u, z, x) - a) / a)
        est, err = noisy_prob_mc(u, z, x, 100_000, RngStream(2024, i + 1))
        worst_z = max(worst_z, abs(est - a) / err)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 1e-9 and worst_z <= 4 and elapsed < 120
    record(2, ok, f"analytic vs decomposition {worst_rel:.2e}, MC max |z| {worst_z:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_orthogonality_and_norms(record):
    t0 = time.perf_counter()
    rep = check_orthogonality(n=3, samples=100_000, seed=3, n_dist=2)
    elapsed = time.perf_counter() - t0
    m = rep["metrics"]
    formula_ok = m["dist_norms_formula"] == [2.0, 0.0, 10.0]
    ok = rep["pass"] and formula_ok and elapsed < 120
    record(3, ok, f"Gaussian max |z| {m['gaussian_max_abs_z']:.2f} (target 36), dist norms "
                  f"{[round(v, 2) for v in m['dist_norms_mc']]} vs {m['dist_norms_formula']}, "
                  f"E|Per|^4 z {m['fourth_moment']['z']:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_telescoping_and_normalisation(record):
    t0 = time.perf_counter()
    rep = check_telescoping(n=4, m=12, ls=(1, 2, 3, 4), prefixes=200, seed=4, tree_n=3, tree_m=6)
    u = haar_unitary(6, RngStream(4, 9))
    full = []
    for l in (1, 2, 3):
        oracle = MarginalOracle(u, 3, 0.5, l)
        full.append(abs(sum(qbar_full(oracle, r) for r in itertools.product(range(6), repeat=3)) - 1.0))
        full.append(abs(sum(qbar_tree(oracle).values()) - 1.0))
    elapsed = time.perf_counter() - t0
    tele = max(rep["metrics"]["max_abs_telescoping_error"].values())
    ok = rep["pass"] and max(full) <= 1e-9 and elapsed < 120
    record(4, ok, f"telescoping {tele:.1e}, full-sum error {max(full):.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_sampler_contract(record):
    t0 = time.perf_counter()
    n, m = 2, 8
    gaps = [sampler_gap_check(haar_unitary(m, RngStream(5, i)), n, x, 1)
            for i in range(3) for x in (0.3, 0.6, 0.9)]
    u = haar_unitary(m, RngStream(5, 99))
    records = sample_many(u, n, 1.0, n, 100_000, seed=5)
    calls = max(r.oracle_calls for r in records)
    counts = {}
    for r in records:
        counts[r.ordered] = counts.get(r.ordered, 0) + 1
    bands = band_test(counts, exact_bs_distribution(u, n), len(records))
    elapsed = time.perf_counter() - t0
    ok = all(g["pass"] for g in gaps) and calls <= m * n and bands["pass"] and elapsed < 180
    worst = max(g["sampler_gap"] - g["bound"] for g in gaps)
    record(5, ok, f"max(gap - 2eps) {worst:.3f}, oracle calls {calls} <= {m * n}, "
                  f"histogram max |z| {bands['max_abs_z']:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_6_tvd_decay(record):
    t0 = time.perf_counter()
    rep = check_decay(n=3, m=60, x=0.5, delta=0.1, draws=50, seed=6)
    elapsed = time.perf_counter() - t0
    rows = rep["metrics"]["rows"]
    ok = rep["pass"] and rep["metrics"]["full_degree_delta"] <= 1e-9 and elapsed < 600
    fracs = ", ".join(f"l={r['l']}: {r['pass_fraction']:.2f}" for r in rows)
    record(6, ok, f"pass fractions {fracs} (threshold {rows[0]['threshold']:.3f}), "
                  f"l=N delta {rep['metrics']['full_degree_delta']:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_7a_distinguishability_anchors(record):
    t0 = time.perf_counter()
    a = dist_anchors(n_max=4, m=8, seed=7)
    elapsed = time.perf_counter() - t0
    ok = a["x1_max_rel_error"] <= 1e-9 and a["x0_max_rel_error"] <= 1e-9 and elapsed < 60
    record("7a", ok, f"x=1 vs |Per|^2 {a['x1_max_rel_error']:.1e}, x=0 vs Per(|U|^2) "
                     f"{a['x0_max_rel_error']:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_7b_distinguishability_decomposition(record):
    t0 = time.perf_counter()
    err = dist_decomposition_error(n=3, m=6, seed=7)
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-9 and elapsed < 60
    record("7b", ok, f"decomposition vs brute force rel err {err:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_7c_summand_count_at_least_n_factorial(record):
    rep = check_dist_barrier(n_max=10, seed=7)
    table = rep["metrics"]["table"]
    all_k = rep["metrics"]["count_at_least_n_factorial_all_k"]
    failing = [(row["N"], row["vanishing_k"]) for row in table if row["min_count"] < row["n_factorial"]]
    record("7c", all_k, f"count >= N! for every k: {all_k}; below N! at (N, k) {failing[:3]}...; "
                        f"non-vanishing k only: {rep['metrics']['count_at_least_n_factorial_nonvanishing_k']}")
    assert all_k, "the k = N-1 part has no summands (a one-element derangement does not exist)"


def test_criterion_8_loss(record):
    t0 = time.perf_counter()
    rep = check_loss_barrier(n=3, m=8, eta=0.6, seed=8)
    elapsed = time.perf_counter() - t0
    rows = rep["metrics"]["truncation"]
    tail_err = max(abs(r["discarded_mass"] - r["binomial_tail"]) for r in rows)
    ok = rep["pass"] and elapsed < 60
    record(8, ok, f"sector error {rep['metrics']['max_sector_error']:.1e}, tail error {tail_err:.1e}, "
                  f"TVD >= discarded for all l: {all(r['tvd_at_least_discarded'] for r in rows)}, {elapsed:.1f}s")
    assert ok


def test_criterion_9_complexity(record):
    bench = bench_marginal(n_values=tuple(range(6, 13)), l=1)
    single = time_single_marginal(n=10, l=2)
    ok = 2.0 <= bench["slope"] <= 4.0 and single < 5.0
    record(9, ok, f"log-log slope {bench['slope']:.2f} (single-call {bench['slope_single_call']:.2f}), "
                  f"N=10 l=2 marginal {single:.3f}s")
    assert ok


def test_criterion_10_determinism(record, tmp_path, capsys):
    def run_all(root):
        root.mkdir()
        u = str(root / "u.json")
        commands = [
            ["unitary", "gen", "--m", "8", "--seed", "10", "--out", u],
            ["sample", "--unitary", u, "--n", "3", "--x", "0.6", "-l", "2", "--count", "300", "--seed", "10",
             "--out", str(root / "s.csv"), "--audit", str(root / "a.jsonl")],
            ["validate", "orthogonality", "--param", "samples=2000", "--param", "seed=10",
             "--out", str(root / "o.json")],
            ["validate", "decay", "--param", "draws=5", "--param", "m=20", "--param", "seed=10",
             "--out", str(root / "d.json")],
            ["validate", "sampler", "--param", "count=500", "--param", "seed=10", "--out", str(root / "p.json")],
        ]
        stdout = []
        for argv in commands:
            cli.main(argv)
            stdout.append(capsys.readouterr().out)
        cli.main(["prob", "noisy", "--unitary", u, "--outcome", "0 3 5", "--x", "0.5", "--method", "mc",
                  "--samples", "2000", "--seed", "10"])
        stdout.append(capsys.readouterr().out)
        (root / "stdout.txt").write_text("".join(stdout))
        return {p.name: p.read_bytes() for p in sorted(root.iterdir())}

    first = run_all(tmp_path / "one")
    second = run_all(tmp_path / "two")
    same = [name for name in first if first[name] == second.get(name)]
    ok = len(same) == len(first) == 7
    record(10, ok, f"{len(same)}/{len(first)} output files byte-identical across reruns")
    assert ok
