import math
import warnings
from fractions import Fraction

import pytest

from dpskey.channel import ChannelSpec
from dpskey.concentration import DeviationBudget
from dpskey.finite_key import Method, ProtocolParams
from dpskey.optimize import (
    BoundaryOptimumWarning,
    evaluate,
    find_crossover,
    optimize_rate,
)

EPS = Fraction(1, 6 * 2**58)
TEMPLATE = ProtocolParams(1e13, 0.5, 58, 28, DeviationBudget(EPS, EPS))
SPEC = ChannelSpec(e_bit=0.01)


def test_recomputation_is_bit_exact():
    opt = optimize_rate(0.3, 1e13, SPEC, TEMPLATE)
    again = evaluate(0.3, opt.mu_opt, opt.t_opt, 1e13, SPEC, TEMPLATE, Method.KATO)
    assert again.rate == opt.rate
    assert again == opt.result


def test_deterministic():
    a = optimize_rate(0.05, 1e12, SPEC, TEMPLATE)
    b = optimize_rate(0.05, 1e12, SPEC, TEMPLATE)
    assert (a.mu_opt, a.t_opt, a.rate) == (b.mu_opt, b.t_opt, b.rate)


def test_optimum_is_local_maximum():
    opt = optimize_rate(0.2, 1e13, SPEC, TEMPLATE)
    for dmu in (0.97, 1.03):
        for dt in (-0.003, 0.003):
            r = evaluate(0.2, opt.mu_opt * dmu, opt.t_opt + dt, 1e13, SPEC, TEMPLATE).rate
            assert r <= opt.rate * (1 + 1e-9)


@pytest.mark.parametrize("eta", [1.0, 0.3, 0.1, 0.03])
def test_kato_at_least_azuma(eta):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryOptimumWarning)
        k = optimize_rate(eta, 1e12, SPEC, TEMPLATE, Method.KATO)
        a = optimize_rate(eta, 1e12, SPEC, TEMPLATE, Method.AZUMA)
    assert k.rate >= a.rate


def test_infeasible_returns_null_optimum():
    opt = optimize_rate(1e-3, 1e10, SPEC, TEMPLATE)
    assert not opt.feasible and opt.rate == 0.0 and opt.result.aborted


def test_asymptotic_bounds_finite():
    fin = optimize_rate(0.1, 1e13, SPEC, TEMPLATE)
    # without deviations sample rounds are pure cost, so t sits on its upper edge
    with pytest.warns(BoundaryOptimumWarning):
        asym = optimize_rate(0.1, 1e13, SPEC, TEMPLATE, asymptotic=True)
    assert asym.rate > fin.rate > 0


def test_boundary_warning_when_optimum_hits_t_edge():
    # error-free channel: a sample round is pure overhead, so t pushes to its maximum
    spec = ChannelSpec(e_bit=0.0)
    with pytest.warns(BoundaryOptimumWarning):
        opt = optimize_rate(1.0, 1e14, spec, TEMPLATE, asymptotic=True)
    assert opt.on_boundary and opt.t_opt == pytest.approx(0.999)


def test_crossover_at_1e13_and_bracket_signs():
    res = find_crossover(1e13, TEMPLATE, SPEC)
    assert res.found
    assert res.q3 == pytest.approx(res.deviation, rel=0.05)
    from dpskey.optimize import _q3_gap
    assert _q3_gap(res.eta_star * 1.2, 1e13, SPEC, TEMPLATE)[0] > 0
    assert _q3_gap(res.eta_star / 1.2, 1e13, SPEC, TEMPLATE)[0] < 0


def test_crossover_moves_down_with_more_blocks():
    stars = [find_crossover(n, TEMPLATE, SPEC).eta_star for n in (1e12, 1e13, 1e14)]
    assert stars[0] > stars[1] > stars[2]


def test_no_crossover_flag():
    res = find_crossover(1e13, TEMPLATE, SPEC, eta_range=(0.5, 1.0))
    assert not res.found and math.isnan(res.eta_star)
