"""Noisy output probabilities, four ways.

Run with ``python demos/01_noisy_probabilities.py``.
"""
# %% setup
import math

import numpy as np

from noisybs.gaussian import (
    degree_parts,
    exact_prob,
    noisy_prob_analytic,
    noisy_prob_decomposition,
    noisy_prob_mc,
)
from noisybs.numerics import RngStream, haar_unitary, submatrix

N, M = 3, 20
U = haar_unitary(M, RngStream(1))
z = (2, 9, 15)
print(f"N={N} photons, M={M} modes, outcome z={z}")

# %% noiseless and fully noisy limits
print("noiseless |Per|^2      ", exact_prob(U, z))
print("x = 0 (uniform) N!/M^N ", noisy_prob_analytic(U, z, 0.0), math.factorial(N) / M ** N)

# %% the degree parts
# Z is the rescaled block sqrt(M) U; each part carries one power of x per degree step.
Z = math.sqrt(M) * submatrix(U, range(N), z)
parts = np.real(degree_parts(Z)) / M ** N
for k, part in enumerate(parts):
    print(f"  k={k}  degree {2 * (N - k)}  contribution {part:+.3e}")

# %% the three routes agree
for x in (0.2, 0.5, 0.8):
    analytic = noisy_prob_analytic(U, z, x)
    decomposed = noisy_prob_decomposition(U, z, x)
    mc, err = noisy_prob_mc(U, z, x, 50_000, RngStream(1, int(10 * x)))
    print(f"x={x}: analytic {analytic:.6e}  decomposition {decomposed:.6e}  "
          f"Monte Carlo {mc:.6e} +/- {err:.1e}")

# %% what truncation throws away
x = 0.5
for l in range(N + 1):
    print(f"l={l}: truncated {noisy_prob_decomposition(U, z, x, l):+.6e}")
