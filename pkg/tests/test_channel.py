import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpskey.channel import (
    ChannelSpec,
    detection_probability,
    ec_cost,
    eta_from_distance,
    expected_counts,
    run_duration_s,
)
from dpskey.entropy import binary_entropy

ETA_77 = 0.014420157515633029712  # 50-digit value of 0.5 * 10**-1.54


def test_expected_counts_example():
    c = expected_counts(ChannelSpec(eta=1.0), 0.01, 0.9, 1e12)
    assert c.n_det == pytest.approx(1e12 * 0.02 * math.exp(-0.02), rel=1e-15)
    assert c.n_code + c.n_samp == pytest.approx(c.n_det, rel=1e-15)
    assert c.e_bit == 0.01


def test_counts_vanish_as_mu_goes_to_zero():
    assert expected_counts(ChannelSpec(), 1e-300, 0.5, 1e13).n_det < 1e-280


def test_detection_unimodal_with_peak_at_half():
    eta = 0.3
    mu = np.geomspace(1e-4, 20, 2001)
    p = np.array([detection_probability(eta, m) for m in mu])
    k = int(np.argmax(p))
    assert 2 * eta * mu[k] == pytest.approx(1.0, rel=1e-2)
    assert np.all(np.diff(p[:k + 1]) > 0) and np.all(np.diff(p[k:]) < 0)


def test_ec_cost_examples():
    assert ec_cost(1e6, 0.0) == 0.0
    assert ec_cost(1e6, 0.5) == pytest.approx(1.16e6)
    assert ec_cost(1e6, 0.01) == pytest.approx(1.16e6 * 0.080793135895911174205, rel=1e-14)
    assert ec_cost(1e6, 0.01) == 1.16 * 1e6 * binary_entropy(0.01)


def test_distance():
    assert eta_from_distance(0.0) == 0.5
    assert eta_from_distance(77.0) == pytest.approx(ETA_77, rel=1e-14)


@given(st.floats(0, 400), st.floats(0, 400))
def test_distance_strictly_decreasing(a, b):
    if abs(a - b) < 1e-9:
        return
    lo, hi = sorted((a, b))
    assert eta_from_distance(lo) > eta_from_distance(hi)


def test_run_duration():
    assert run_duration_s(1e13, ChannelSpec()) == pytest.approx(3e4)


@pytest.mark.parametrize("kwargs", [{"eta": 0.0}, {"eta": 1.5}, {"e_bit": -0.1},
                                    {"rep_rate_hz": 0.0}, {"fiber_loss_db_per_km": -1}])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ChannelSpec(**kwargs)


def test_expected_counts_validation():
    with pytest.raises(ValueError):
        expected_counts(ChannelSpec(), 0.0, 0.5, 1e10)
    with pytest.raises(ValueError):
        expected_counts(ChannelSpec(), 0.1, 0.0, 1e10)
