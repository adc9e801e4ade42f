"""Partial distinguishability: anchors, norms and summand counts."""
# %% setup
import math

from noisybs.distinguishability import (
    barrier_table,
    dist_norm_formula,
    dist_prob_exact,
    distinguishable_prob,
)
from noisybs.gaussian import exact_prob
from noisybs.numerics import RngStream, haar_unitary

U = haar_unitary(8, RngStream(4))
z = (0, 3, 6)

# %% interpolating between the two anchors
print("|Per U|^2     ", exact_prob(U, z))
print("Per(|U|^2)    ", distinguishable_prob(U, z))
for x in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"x={x:4}: {dist_prob_exact(U, z, x):.6e}")

# %% norms of the degree parts
for n in range(1, 6):
    norms = [dist_norm_formula(n, k) for k in range(n + 1)]
    print(f"N={n}: {norms}  max / (e N!)^2 = {max(norms) / (math.e * math.factorial(n)) ** 2:.3f}")

# %% how many summands each part has
for row in barrier_table(6):
    if row["N"] >= 3:
        flag = "" if row["summands"] else "  (no summands)"
        print(f"N={row['N']} k={row['k']}: {row['summands']:>8}  N!={row['n_factorial']}{flag}")
