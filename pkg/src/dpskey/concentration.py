"""Concentration bounds: Azuma deviation, Chernoff inflation and Kato coefficients.

Failure probabilities are handled through ``log_inv = ln(1/eps)``. Every
function taking an ``eps`` also accepts ``log_inv_*`` directly so that tiny
probabilities never need to be materialised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from . import _core

LAMBDA = 3.0 + math.sqrt(5.0)


def log_inv(eps: Real) -> float:
    """``ln(1/eps)`` computed without underflow, exact-rational aware."""
    if isinstance(eps, Fraction):
        if not 0 < eps <= 1:
            raise ValueError(f"probability must lie in (0, 1], got {eps}")
        return math.log(eps.denominator) - math.log(eps.numerator)
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"probability must lie in (0, 1], got {eps!r}")
    return -math.log(eps)


def _resolve(eps, log_inv_eps, name):
    if log_inv_eps is None:
        if eps is None:
            raise ValueError(f"either {name} or its log must be given")
        return log_inv(eps)
    if not (math.isfinite(log_inv_eps) and log_inv_eps >= 0):
        raise ValueError(f"ln(1/{name}) must be finite and >= 0")
    return float(log_inv_eps)


@dataclass(frozen=True)
class DeviationBudget:
    """Failure probabilities of the concentration (eps1) and Chernoff (eps2) steps.

    Each is spent three times, so the phase-error bound fails with
    probability at most ``3*eps1 + 3*eps2``. Values may be floats or
    :class:`fractions.Fraction`; fractions keep the security parameter exact.
    """

    epsilon1: Real
    epsilon2: Real

    def __post_init__(self):
        for name in ("epsilon1", "epsilon2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")

    @property
    def log_inv_eps1(self) -> float:
        return log_inv(self.epsilon1)

    @property
    def log_inv_eps2(self) -> float:
        return log_inv(self.epsilon2)

    @property
    def failure_probability(self) -> Real:
        return 3 * self.epsilon1 + 3 * self.epsilon2


def azuma_delta(x: float, y: float | None, n_det: float, *,
                log_inv_y: float | None = None) -> float:
    """Azuma deviation ``sqrt(2 * x * n_det * ln(1/y))``.

    ``x`` is the squared bounded-difference constant (1 for indicator sums,
    ``D**2`` for the phase-error martingale).
    """
    if not x > 0:
        raise ValueError("x must be positive")
    if not n_det >= 1:
        raise ValueError("n_det must be at least 1")
    L = _resolve(y, log_inv_y, "y")
    return math.sqrt(2.0 * x * n_det * L)


def bounded_difference(t: float) -> float:
    """Bounded-difference constant ``D`` of the phase-error martingale."""
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    return max(LAMBDA / (1.0 - t) + 1.0, 1.0 / t + LAMBDA + 1.0)


def chernoff_gamma(q_n: float, t: float, n_em: float, eps2: float | None = None, *,
                   log_inv_eps2: float | None = None) -> float:
    """Chernoff inflation added to ``t * q_n * n_em`` for a one-sided upper bound."""
    if not 0 <= q_n <= 1:
        raise ValueError("q_n must lie in [0, 1]")
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if not n_em > 0:
        raise ValueError("n_em must be positive")
    L = _resolve(eps2, log_inv_eps2, "eps2")
    return 0.5 * (L + math.sqrt(L * L + 8.0 * t * q_n * n_em * L))


@dataclass(frozen=True)
class KatoCoefficients:
    """Clamped Kato pair for ``n_trials`` rounds and prediction ``prediction``.

    The prediction is an integer in the protocol; model-predicted counts keep
    ``n_trials`` real-valued.
    """

    a_star: float
    b_star: float
    n_trials: float
    prediction: float
    log_inv_eps: float

    @property
    def epsilon(self) -> float:
        return math.exp(-self.log_inv_eps)

    def failure_exponent(self) -> float:
        """``(2b^2 - 2a^2) / (1 + 4a / (3 sqrt n))^2``, equal to ``ln(1/eps)``."""
        return kato_exponent(self.a_star, self.b_star, self.n_trials)


def kato_exponent(a: float, b: float, n: float) -> float:
    """Exponent of the Kato tail bound, ``Pr <= exp(-exponent)``."""
    return (2 * b * b - 2 * a * a) / (1 + 4 * a / (3 * math.sqrt(n))) ** 2


def _check_kato_domain(n, m, eps, log_inv_eps):
    if not n > 0:
        raise ValueError("n must be positive")
    if not m >= 0:
        raise ValueError("m must be non-negative")
    if not m < n / 2:
        raise ValueError(f"prediction m={m} must be below n/2={n / 2}")
    L = _resolve(eps, log_inv_eps, "eps")
    if L <= 0:
        raise ValueError("eps must lie in (0, 1)")
    return L


def kato_prime(n: float, m: float, eps: float | None = None, *,
               log_inv_eps: float | None = None) -> tuple[float, float]:
    """Closed-form minimiser ``(a', b')`` of the Kato deviation for prediction ``m``.

    Minimises ``[b + a(2m/n - 1)] sqrt(n)`` subject to the tail bound being
    exactly ``eps``. Evaluated in extended precision.
    """
    L = _check_kato_domain(n, m, eps, log_inv_eps)
    return _core.kato_prime(float(n), float(m), L)


def kato_star(n: float, m: float, eps: float | None = None, *,
              log_inv_eps: float | None = None) -> KatoCoefficients:
    """Kato coefficients with ``a`` clamped at ``-sqrt(n)/2``.

    The clamp makes ``N3 + omega`` non-decreasing in ``N3``; ``b`` is
    recomputed from the clamped ``a`` so the tail bound stays at ``eps``.
    """
    L = _check_kato_domain(n, m, eps, log_inv_eps)
    a, b = _core.kato_star(float(n), float(m), L)
    return KatoCoefficients(a, b, n, m, L)


def kato_omega(n_det: float, n3: float, coeffs: KatoCoefficients) -> float:
    """Kato deviation ``[b* + a*(2 n3/n_det - 1)] sqrt(n_det)``."""
    if not 0 <= n3 <= n_det:
        raise ValueError(f"n3={n3} must lie in [0, n_det={n_det}]")
    if n_det != coeffs.n_trials:
        raise ValueError("coefficients were built for a different n_det")
    return (coeffs.b_star + coeffs.a_star * (2.0 * n3 / n_det - 1.0)) * math.sqrt(n_det)


def kato_upper_bound(n_det: float, n3: float, coeffs: KatoCoefficients) -> float:
    """Upper bound on the sum of conditional means given ``n3`` observed successes."""
    return n3 + kato_omega(n_det, n3, coeffs)
