import numpy as np
import pytest

from dpskey.channel import ChannelSpec
from dpskey.validation import (
    CoverageResult,
    MartingaleProcess,
    coverage_azuma,
    coverage_chernoff,
    coverage_kato,
    sample_protocol_tallies,
)


def test_sampling_is_deterministic_and_worker_independent():
    proc = MartingaleProcess(500, 0.05, "scheduled", seed=11)
    a = proc.sample(4500)
    b = proc.sample(4500, workers=3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_adaptive_worker_independent():
    proc = MartingaleProcess(200, 0.2, "adaptive", seed=5)
    assert np.array_equal(proc.sample(2500)[0], proc.sample(2500, workers=2)[0])


def test_schedule_mean_and_range():
    s = MartingaleProcess(20000, 0.01, "scheduled", seed=1).schedule()
    assert s.min() >= 0 and s.max() <= 0.02
    assert s.mean() == pytest.approx(0.01, rel=0.02)


def test_coverage_result_limits():
    r = CoverageResult(6, 100, 0.05)
    assert r.frequency == 0.06
    assert r.limit == pytest.approx(0.05 + 3 * np.sqrt(0.05 * 0.95 / 100))
    assert r.ok
    assert not CoverageResult(20, 100, 0.05).ok


def test_azuma_vacuous_at_eps_one():
    r = coverage_azuma(MartingaleProcess(100, 0.5, seed=2), 1.0, 2000)
    assert 0.4 < r.frequency <= 1.0 and r.ok


def test_azuma_scheduled_small():
    r = coverage_azuma(MartingaleProcess(2000, 0.2, "scheduled", seed=3), 0.05, 4000)
    assert r.ok


def test_kato_zero_probability_has_no_violations():
    r = coverage_kato(MartingaleProcess(1000, 0.0, seed=4), 0, 0.05, 2000)
    assert r.violations == 0


def test_kato_accurate_prediction_small():
    r = coverage_kato(MartingaleProcess(2000, 0.01, "scheduled", seed=6), 20, 0.05, 4000)
    assert r.ok


def test_chernoff_zero_q():
    assert coverage_chernoff(0.0, 0.9, 10**6, 1e-3, 1000, seed=1).violations == 0


def test_chernoff_example():
    r = coverage_chernoff(1e-4, 0.9, 10**7, 1e-3, 10**4, seed=8)
    assert r.frequency <= 1.5e-3


def test_tallies_split_and_t_one():
    spec = ChannelSpec(eta=0.2, e_bit=0.05)
    c = sample_protocol_tallies(spec, 0.01, 1.0, 10**6, seed=3)
    assert c.n_samp == 0 and c.n_code == c.n_det
    c = sample_protocol_tallies(spec, 0.01, 0.7, 10**6, seed=3)
    assert c.n_code + c.n_samp == c.n_det
    assert c == sample_protocol_tallies(spec, 0.01, 0.7, 10**6, seed=3)


def test_validation_errors():
    with pytest.raises(ValueError):
        MartingaleProcess(0, 0.1)
    with pytest.raises(ValueError):
        MartingaleProcess(10, 0.7, "adaptive")
    with pytest.raises(ValueError):
        MartingaleProcess(10, 0.1, "other")
    with pytest.raises(ValueError):
        sample_protocol_tallies(ChannelSpec(), 0.01, 0.5, 10**9)
