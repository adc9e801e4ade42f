"""Classical simulation of noisy boson sampling by low-degree truncation.

Submodules
----------
numerics            Haar unitaries, Ginibre draws, permanents, RNG streams
combinatorics       subsets, bijections, agreement sets, derangements
outcomes            r / z / m outcome encodings and the collision symbol
gaussian            Gaussian circuit noise: degree parts, exact and noisy probabilities, cutoffs
marginal            truncated marginals, collision values, the sequential sampler
distinguishability  partial distinguishability: exact evaluator, norms, summand counts
loss                uniform photon loss and its truncation
validation          oracles, statistical checks, experiment reports
"""
from .gaussian import (
    CutoffPolicy,
    GaussianNoiseSpec,
    exact_prob,
    exact_prob_general,
    f_eval,
    noisy_prob_analytic,
    noisy_prob_decomposition,
    noisy_prob_mc,
    select_cutoff,
    tvd_bound,
)
from .marginal import MarginalOracle, SampleRecord, qbar_marginal, sample, sample_many
from .numerics import RngStream, ginibre, haar_unitary, permanent_naive, permanent_ryser, submatrix
from .outcomes import COLLISION
from .validation import tvd

__version__ = "0.1.0"
