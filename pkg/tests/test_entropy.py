import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpskey.entropy import SourceSpec, binary_entropy, poisson_block_tail, poisson_tail
import oracles

# 50-digit mpmath values, frozen
H_011 = 0.49991595816452799731
H_001 = 0.080793135895911174205
Q_0093 = (0.027514389499969079378, 0.00038204096701821891161, 3.5447049835544390484e-6)
Q_1EM5 = (0.000029999550004499970398, 4.4999100010124931445e-10, 4.4998987512149917417e-15)


@pytest.mark.parametrize("x, expected", [(0.11, H_011), (0.01, H_001)])
def test_entropy_frozen(x, expected):
    assert binary_entropy(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (0.5, 1.0), (0.7, 1.0), (3.0, 1.0)])
def test_entropy_edges_and_cap(x, expected):
    assert binary_entropy(x) == expected


@pytest.mark.parametrize("x", [-0.1, math.nan, math.inf])
def test_entropy_rejects(x):
    with pytest.raises(ValueError):
        binary_entropy(x)


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_entropy_monotone_on_lower_half(x, y):
    lo, hi = sorted((x, y))
    assert binary_entropy(lo) <= binary_entropy(hi) + 1e-15


@given(st.floats(1e-12, 0.5))
@settings(max_examples=60)
def test_entropy_matches_mpmath(x):
    assert binary_entropy(x) == pytest.approx(float(oracles.entropy(x)), rel=1e-12)


@pytest.mark.parametrize("mu, expected", [(0.0093, Q_0093), (1e-5, Q_1EM5)])
def test_block_tails_frozen(mu, expected):
    src = SourceSpec(mu)
    for n, q in zip((1, 2, 3), expected):
        assert src.q(n) == pytest.approx(q, rel=1e-12)


def test_tail_small_mean_has_no_cancellation():
    # the complement would lose every digit here
    q3 = poisson_tail(3e-7, 3)
    assert q3 == pytest.approx(float(oracles.poisson_tail(3e-7, 3)), rel=1e-12)
    assert q3 > 0


def test_tail_trivial_and_large_mean():
    assert poisson_tail(2.0, 0) == 1.0
    assert poisson_tail(30.0, 3) == pytest.approx(float(oracles.poisson_tail(30.0, 3)), rel=1e-12)


@given(st.floats(1e-9, 5.0), st.integers(1, 6))
@settings(max_examples=80)
def test_tail_matches_mpmath(mean, n):
    assert poisson_tail(mean, n) == pytest.approx(float(oracles.poisson_tail(mean, n)),
                                                  rel=1e-11)


@given(st.floats(1e-8, 0.3))
def test_tails_decrease_in_n(mu):
    src = SourceSpec(mu)
    assert 1.0 >= src.q(1) >= src.q(2) >= src.q(3) > 0


@given(st.floats(1e-8, 0.3), st.floats(1e-8, 0.3))
def test_tails_increase_in_mu(a, b):
    lo, hi = sorted((a, b))
    for n in (1, 2, 3):
        assert poisson_block_tail(SourceSpec(lo), n) <= poisson_block_tail(SourceSpec(hi), n) * (1 + 1e-12)


@pytest.mark.parametrize("kwargs", [{"mu": 0.0}, {"mu": -1.0}, {"mu": math.nan},
                                    {"mu": 0.1, "block_pulses": 2}])
def test_source_validation(kwargs):
    with pytest.raises(ValueError):
        SourceSpec(**kwargs)
