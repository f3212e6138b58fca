import math

import numpy as np
import pytest

from ultinet.automaton import Cala, cala_step, clamped_ratio, phi, sample, update
from ultinet.verify import check_quadratic, check_sign, check_stationarity, check_variance_floor


def test_phi_floors_small_sigma():
    assert phi(0.5) == 0.5
    assert phi(1e-9) == 1e-7
    assert phi(-3.0) == 1e-7
    assert phi(1e-9, 1e-3) == 1e-3


def test_clamped_ratio_examples():
    assert clamped_ratio(0.0, 10.0, 1.0) == 1.0
    assert clamped_ratio(10.0, 0.0, 1.0) == -1.0
    assert clamped_ratio(5.0, 5.5, 1.0) == pytest.approx(0.5)
    # a tiny sigma makes any nonzero difference saturate
    assert clamped_ratio(5.0, 5.0 + 1e-6, 1e-9) == 1.0


def test_hand_computed_step():
    # r = clamp(10 / 1) = 1, z = (6 - 5) / 1 = 1
    mu, sigma = cala_step(5.0, 1.0, 6.0, 0.0, 10.0, 0.02, 0.001, 1e-7)
    assert mu == pytest.approx(5.02)
    assert sigma == pytest.approx(1.0 - 0.02 * 0.001 * (1.0 - 1e-7))


def test_unlimited_step_uses_raw_ratio():
    mu, _ = cala_step(5.0, 1.0, 6.0, 0.0, 10.0, 0.02, 0.0, 1e-7, False)
    assert mu == pytest.approx(5.2)


def test_step_rejects_non_finite():
    with pytest.raises(ValueError):
        cala_step(math.nan, 1.0, 0.0, 0.0, 0.0, 0.02, 0.001, 1e-7)
    with pytest.raises(ValueError):
        cala_step(0.0, 1.0, math.inf, 0.0, 0.0, 0.02, 0.001, 1e-7)


def test_cala_validates_parameters():
    with pytest.raises(ValueError):
        Cala(0.0, lam=0.0)
    with pytest.raises(ValueError):
        Cala(0.0, sigma_floor=-1.0)


def test_cala_update_returns_new_object():
    c = Cala(5.0, 1.0)
    d = c.update(6.0, 0.0, 10.0)
    assert c.mu == 5.0
    assert d.mu == pytest.approx(5.02)
    assert update(c, 6.0, 0.0, 10.0) == d


def test_sample_statistics():
    rng = np.random.default_rng(1)
    c = Cala(2.0, 0.5)
    xs = np.array([sample(c, rng) for _ in range(20_000)])
    assert xs.mean() == pytest.approx(2.0, abs=0.02)
    assert xs.std() == pytest.approx(0.5, rel=0.03)


def test_sample_uses_floored_spread():
    rng = np.random.default_rng(0)
    c = Cala(1.0, 1e-12)
    xs = np.array([c.sample(rng) for _ in range(1000)])
    assert np.abs(xs - 1.0).max() < 1e-6
    assert xs.std() > 0


@pytest.mark.parametrize("check", [check_variance_floor, check_stationarity, check_sign])
def test_property_suites(check):
    result = check(seed=3)
    assert result.passed, result.detail


def test_quadratic_convergence():
    result = check_quadratic(seed=5, c=-2.5)
    assert result.passed, result.detail
