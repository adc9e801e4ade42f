"""Sampling from the truncated distribution.

Picks a cutoff for a target error, draws samples photon by photon, and
compares the empirical histogram with the noisy distribution.
"""
# %% setup
import collections

from noisybs.gaussian import select_cutoff, tvd_bound
from noisybs.marginal import MarginalOracle, induced_distribution, sample_many
from noisybs.numerics import RngStream, haar_unitary
from noisybs.outcomes import COLLISION
from noisybs.validation import enumerate_noisy, enumerate_qbar, tvd

N, M, x = 3, 10, 0.4
U = haar_unitary(M, RngStream(2))

# %% choose the cutoff
# a loose target keeps the cutoff well below N so the truncation is visible
l = max(1, select_cutoff(N, x, eps=1.0, delta=0.5))
print(f"cutoff l={l}, bound at delta=0.5: {tvd_bound(N, x, l, 0.5):.3f}")

# %% the quasi-distribution can go negative
qbar = enumerate_qbar(U, N, x, l)
negative = [k for k, v in qbar.items() if v < 0]
print(f"{len(negative)} of {len(qbar)} truncated values are negative")

# %% draw samples
records = sample_many(U, N, x, l, 5000, seed=2)
hist = collections.Counter(r.ordered for r in records)
print("most common outcomes:", hist.most_common(5))
print("collision fraction:", hist[COLLISION] / len(records))
print("max oracle calls per sample:", max(r.oracle_calls for r in records), "budget", M * N)

# %% exact comparison by walking the whole tree
p = enumerate_noisy(U, N, x)
q = induced_distribution(MarginalOracle(U, N, x, l))
q_ordered = collections.defaultdict(float)
for key, val in q.items():
    q_ordered[key if key == COLLISION else tuple(sorted(key))] += val
print(f"||p - qbar||_1 = {tvd(p, qbar):.4f}")
print(f"||p - q||_1    = {tvd(p, dict(q_ordered)):.4f}  (sampler law)")
