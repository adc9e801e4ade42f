import itertools
import math

import pytest

from noisybs.gaussian import exact_prob
from noisybs.loss import (
    LossSpec,
    discarded_mass,
    loss_barrier_report,
    lossy_prob,
    lossy_truncated,
    sector_mass,
    truncated_prefactor,
)
from noisybs.outcomes import multiplicity


def test_loss_spec():
    assert LossSpec(eta_direct=0.3).eta == 0.3
    assert LossSpec(eta1=0.9, depth=2).eta == pytest.approx(0.81)
    with pytest.raises(ValueError):
        LossSpec(eta_direct=1.2)
    with pytest.raises(ValueError):
        LossSpec(eta1=0.0, depth=2)
    with pytest.raises(ValueError):
        LossSpec()


def test_no_loss_reduces_to_boson_sampling(unitary8):
    z = (0, 4, 5)
    assert lossy_prob(unitary8, 3, z, 1.0) == pytest.approx(exact_prob(unitary8, z) / 6, rel=1e-12)


def test_vacuum(unitary8):
    assert lossy_prob(unitary8, 3, (), 0.3) == pytest.approx(0.7 ** 3)


def test_sector_masses(unitary8):
    n, eta = 3, 0.6
    total = 0.0
    for k in range(n + 1):
        mass = sum(multiplicity(z) * lossy_prob(unitary8, n, z, eta)
                   for z in itertools.combinations_with_replacement(range(8), k))
        assert mass == pytest.approx(math.comb(n, k) * eta ** k * (1 - eta) ** (n - k), abs=1e-9)
        assert mass == pytest.approx(sector_mass(n, k, eta))
        total += mass
    assert total == pytest.approx(1.0, abs=1e-9)


def test_truncation(unitary8):
    for z in [(), (2,), (1, 6), (0, 3, 7)]:
        assert lossy_truncated(unitary8, 3, z, 0.7, 3) == pytest.approx(lossy_prob(unitary8, 3, z, 0.7), abs=1e-15)
    assert lossy_truncated(unitary8, 3, (1, 6), 0.7, 1) == 0.0
    assert truncated_prefactor(3, 1, 0.5, 3) == pytest.approx(0.5 * 0.25)
    assert truncated_prefactor(3, 1, 0.5, 1) == pytest.approx(0.5)


def test_discarded_mass():
    assert discarded_mass(3, 0.9, 1) == pytest.approx(3 * 0.81 * 0.1 + 0.729)
    assert discarded_mass(10, 0.5, 5) == pytest.approx(386 / 1024, abs=1e-15)
    assert discarded_mass(6, 1.0, 4) == 1.0
    assert discarded_mass(6, 0.0, 2) == 0.0


def test_barrier_report():
    rep = loss_barrier_report(10, 0.5, 5, target=0.01)
    assert rep["discarded_mass"] == pytest.approx(386 / 1024)
    assert rep["mean_photons"] == 5.0
    assert rep["std_photons"] == pytest.approx(math.sqrt(2.5))
    assert discarded_mass(10, 0.5, rep["required_l"]) <= 0.01 < discarded_mass(10, 0.5, rep["required_l"] - 1)
    assert rep["required_l"] >= rep["mean_photons"]
    with pytest.raises(ValueError):
        loss_barrier_report(4, 0.5, 5)


def test_bad_arguments(unitary8):
    with pytest.raises(ValueError):
        lossy_prob(unitary8, 2, (0, 1, 2), 0.5)
    with pytest.raises(ValueError):
        lossy_prob(unitary8, 3, (0, 9), 0.5)
    with pytest.raises(ValueError):
        lossy_prob(unitary8, 3, (0, 1), 1.5)
