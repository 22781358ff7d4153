"""Key-rate maximisation over (mu, t) and the Azuma crossover search."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _core
from .channel import ChannelSpec, EC_INEFFICIENCY, ec_cost, expected_counts
from .concentration import azuma_delta
from .entropy import SourceSpec
from .finite_key import KeyRateResult, Method, ProtocolParams, key_length

MU_RANGE = (1e-7, 1e-1)
T_RANGE = (0.5, 0.999)
MU_POINTS = 49
T_POINTS = 25
REFINE_ROUNDS = 2
_SHRINK = 4


class BoundaryOptimumWarning(UserWarning):
    """The optimum sits on the edge of the searched (mu, t) box."""


@dataclass(frozen=True)
class OptimizationResult:
    eta: float
    n_em: float
    mu_opt: float
    t_opt: float
    rate: float
    result: KeyRateResult
    feasible: bool
    on_boundary: bool


def evaluate(eta: float, mu: float, t: float, n_em: float, spec: ChannelSpec,
             template: ProtocolParams, method: Method | str = Method.KATO, *,
             asymptotic: bool = False) -> KeyRateResult:
    """Key length for the expected counts of one operating point."""
    params = replace(template, t=t, n_em=n_em)
    counts = expected_counts(replace(spec, eta=eta), mu, t, n_em)
    n_ec = ec_cost(counts.n_code, spec.e_bit)
    return key_length(params, counts, SourceSpec(mu), method, n_ec, asymptotic=asymptotic)


def _grid(log_mu, t, eta, n_em, spec, template, method, asymptotic):
    b = template.budget
    return _core.ell_grid(
        10.0 ** log_mu, t, eta, n_em, spec.e_bit, float(template.zeta),
        float(template.zeta_prime), b.log_inv_eps1, b.log_inv_eps2, EC_INEFFICIENCY,
        0 if Method(method) is Method.KATO else 1, bool(asymptotic))


def _argmax(ell, log_mu, t):
    # max of ell, ties broken towards smaller mu, then smaller t
    best = np.max(ell)
    i, j = np.nonzero(ell == best)
    k = np.lexsort((t[j], log_mu[i]))[0]
    return i[k], j[k]


def optimize_rate(eta: float, n_em: float, spec: ChannelSpec, params_template: ProtocolParams,
                  method: Method | str = Method.KATO, *, asymptotic: bool = False,
                  rounds: int = REFINE_ROUNDS) -> OptimizationResult:
    """Maximise the key rate over the mean photon number and the code probability.

    A 49 x 25 grid (log-spaced in mu over ``MU_RANGE``, linear in t over
    ``T_RANGE``) is followed by ``rounds`` refinements, each shrinking the
    step fourfold around the incumbent. The reported result is recomputed at
    the optimum through :func:`evaluate`.
    """
    lo, hi = (math.log10(v) for v in MU_RANGE)
    log_mu = np.linspace(lo, hi, MU_POINTS)
    t = np.linspace(*T_RANGE, T_POINTS)
    step_mu, step_t = log_mu[1] - log_mu[0], t[1] - t[0]
    ell = _grid(log_mu, t, eta, n_em, spec, params_template, method, asymptotic)
    i, j = _argmax(ell, log_mu, t)
    best_mu, best_t = log_mu[i], t[j]

    offsets = np.arange(-_SHRINK, _SHRINK + 1)
    for _ in range(rounds):
        step_mu /= _SHRINK
        step_t /= _SHRINK
        log_mu = best_mu + step_mu * offsets
        log_mu = log_mu[(log_mu >= lo) & (log_mu <= hi)]
        t = best_t + step_t * offsets
        t = t[(t >= T_RANGE[0]) & (t <= T_RANGE[1])]
        ell = _grid(log_mu, t, eta, n_em, spec, params_template, method, asymptotic)
        i, j = _argmax(ell, log_mu, t)
        best_mu, best_t = log_mu[i], t[j]

    mu_opt, t_opt = float(10.0 ** best_mu), float(best_t)
    res = evaluate(eta, mu_opt, t_opt, n_em, spec, params_template, method,
                   asymptotic=asymptotic)
    feasible = not res.aborted
    on_boundary = (best_mu - lo < step_mu or hi - best_mu < step_mu
                   or best_t - T_RANGE[0] < step_t or T_RANGE[1] - best_t < step_t)
    if feasible and on_boundary:
        warnings.warn(f"optimum at eta={eta:g} lies on the search boundary "
                      f"(mu={mu_opt:.3g}, t={t_opt:.4g})", BoundaryOptimumWarning,
                      stacklevel=2)
    return OptimizationResult(eta, n_em, mu_opt, t_opt, res.rate, res, feasible, on_boundary)


@dataclass(frozen=True)
class CrossoverResult:
    n_em: float
    eta_star: float
    q3: float
    deviation: float
    found: bool


def _q3_gap(eta, n_em, spec, template):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryOptimumWarning)
        opt = optimize_rate(eta, n_em, spec, template, Method.AZUMA)
    if not opt.feasible:
        return None
    q3 = SourceSpec(opt.mu_opt).q(3)
    n_det = expected_counts(replace(spec, eta=eta), opt.mu_opt, opt.t_opt, n_em).n_det
    dev = azuma_delta(1.0, None, n_det, log_inv_y=template.budget.log_inv_eps1)
    dev /= opt.t_opt * n_em
    return q3 - dev, q3, dev


def find_crossover(n_em: float, params_template: ProtocolParams, spec: ChannelSpec, *,
                   eta_range=(1e-3, 1.0), tol: float = 1e-3,
                   scan_points: int = 31) -> CrossoverResult:
    """Transmission where ``q3`` meets the Azuma deviation ``delta(1, eps1) / (t n_em)``.

    Both sides are evaluated at the Azuma-optimal ``(mu, t)``. A log-spaced
    scan from the top of ``eta_range`` down locates the first sign change
    between feasible points, which is then bisected to ``tol``.
    """
    etas = np.geomspace(eta_range[1], eta_range[0], scan_points)
    prev = None
    for eta in etas:
        cur = _q3_gap(float(eta), n_em, spec, params_template)
        if cur is None:
            prev = None
            continue
        if prev is not None and (prev[1][0] > 0) != (cur[0] > 0):
            hi_eta, lo_eta = prev[0], float(eta)
            hi_sign = prev[1][0] > 0
            while hi_eta - lo_eta > tol:
                mid = 0.5 * (hi_eta + lo_eta)
                g = _q3_gap(mid, n_em, spec, params_template)
                if g is None or (g[0] > 0) != hi_sign:
                    lo_eta = mid
                else:
                    hi_eta = mid
            star = 0.5 * (hi_eta + lo_eta)
            g = _q3_gap(star, n_em, spec, params_template) or (math.nan, math.nan, math.nan)
            return CrossoverResult(n_em, star, g[1], g[2], True)
        prev = (float(eta), cur)
    return CrossoverResult(n_em, math.nan, math.nan, math.nan, False)
