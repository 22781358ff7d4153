"""Phase-error upper bounds, privacy amplification and the finite secret-key length."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .concentration import (
    LAMBDA,
    DeviationBudget,
    azuma_delta,
    bounded_difference,
    chernoff_gamma,
    kato_star,
)
from .entropy import SourceSpec, binary_entropy

_COUNT_RTOL = 1e-9


class Method(str, enum.Enum):
    KATO = "kato"
    AZUMA = "azuma"


@dataclass(frozen=True)
class ProtocolParams:
    """Knobs fixed before the protocol runs.

    Attributes:
        n_em: Number of emitted three-pulse blocks.
        t: Probability that a detected round is a code round.
        zeta: Privacy-amplification slack in bits.
        zeta_prime: Error-verification hash length in bits.
        budget: Failure probabilities of the estimation steps.
    """

    n_em: float
    t: float
    zeta: float
    zeta_prime: float
    budget: DeviationBudget

    def __post_init__(self):
        if not self.n_em > 0:
            raise ValueError("n_em must be positive")
        if not 0 < self.t < 1:
            raise ValueError(f"t must lie in (0, 1), got {self.t!r}")
        if not (self.zeta > 0 and self.zeta_prime > 0):
            raise ValueError("zeta and zeta_prime must be positive")


@dataclass(frozen=True)
class ObservedCounts:
    """Tallies of a protocol run, or their model expectations (then real-valued)."""

    n_det: float
    n_code: float
    n_samp: float
    e_bit: float

    def __post_init__(self):
        if min(self.n_det, self.n_code, self.n_samp) < 0:
            raise ValueError("counts must be non-negative")
        if not 0 <= self.e_bit <= 1:
            raise ValueError("e_bit must lie in [0, 1]")
        if abs(self.n_code + self.n_samp - self.n_det) > _COUNT_RTOL * max(1.0, self.n_det):
            raise ValueError("n_code + n_samp must equal n_det")


@dataclass(frozen=True)
class KeyRateResult:
    """Outcome of one key-length evaluation.

    ``ell`` is clamped at zero; ``raw_ell`` keeps the signed value. A
    non-positive ``raw_ell`` means the protocol aborts.
    """

    n_ph_u: float
    n_pa: float
    n_ec: float
    n_code: float
    raw_ell: float
    ell: float
    rate: float
    eps_sec: float
    method: Method

    @property
    def aborted(self) -> bool:
        return not self.raw_ell > 0


def n3_prediction(params: ProtocolParams, q3: float, gamma3: float, n_det: float) -> int:
    """Prediction of the three-photon count fed to the Kato coefficients.

    The Chernoff upper bound ``t*q3*n_em + gamma3`` is rounded up to an
    integer and capped at ``floor((n_det - 1)/2)`` so it stays below
    ``n_det/2``.
    """
    if n_det < 2:
        raise ValueError("need at least two detected rounds for a prediction")
    first = math.ceil(params.t * q3 * params.n_em + gamma3)
    return int(min(first, math.floor((n_det - 1) / 2)))


def _shared_terms(params, counts, source, asymptotic):
    t, n_em = params.t, params.n_em
    q = [source.q(n) for n in (1, 2, 3)]
    bit_term = LAMBDA * t * counts.e_bit * counts.n_samp / (1.0 - t)
    if asymptotic:
        return q, [0.0, 0.0, 0.0], 0.0, bit_term + t * q[1] * n_em
    L1, L2 = params.budget.log_inv_eps1, params.budget.log_inv_eps2
    gammas = [chernoff_gamma(qn, t, n_em, log_inv_eps2=L2) for qn in q]
    delta1 = azuma_delta(1.0, None, counts.n_det, log_inv_y=L1)
    d = bounded_difference(t)
    mart = t * azuma_delta(d * d, None, counts.n_det, log_inv_y=L1)
    return q, gammas, delta1, bit_term + t * q[1] * n_em + gammas[1] + mart


def phase_error_bound_kato(params: ProtocolParams, counts: ObservedCounts,
                           source: SourceSpec, *, asymptotic: bool = False) -> float:
    """Upper bound on the phase-error count, three-photon term bounded with Kato.

    Holds except with probability ``3*eps1 + 3*eps2``. With ``asymptotic``
    every statistical deviation is dropped (the ``n_em -> inf`` limit).
    """
    t, n_em = params.t, params.n_em
    q, g, delta1, base = _shared_terms(params, counts, source, asymptotic)
    three = t * q[2] * n_em + g[2]
    if asymptotic:
        second = three
    else:
        n = counts.n_det
        m = n3_prediction(params, q[2], g[2], n)
        k = kato_star(n, m, log_inv_eps=params.budget.log_inv_eps1)
        sn = math.sqrt(n)
        second = three * (1.0 + 2.0 * k.a_star / sn) + (k.b_star - k.a_star) * sn
    first = t * q[0] * n_em + g[0] + delta1
    if first < 0 or second < 0:
        return math.inf
    return base + LAMBDA * math.sqrt(first * second)


def phase_error_bound_azuma(params: ProtocolParams, counts: ObservedCounts,
                            source: SourceSpec, *, asymptotic: bool = False) -> float:
    """Upper bound on the phase-error count using Azuma for every martingale."""
    t, n_em = params.t, params.n_em
    if counts.n_det < 1 and not asymptotic:
        raise ValueError("need at least one detected round")
    q, g, delta1, base = _shared_terms(params, counts, source, asymptotic)
    tn = t * n_em
    first = q[0] + (g[0] + delta1) / tn
    second = q[2] + (g[2] + delta1) / tn
    return base + LAMBDA * tn * math.sqrt(first * second)


def privacy_amplification(n_code: float, n_ph_u: float, zeta: float) -> float:
    """Bits removed in privacy amplification, ``n_code * h(n_ph_u/n_code) + zeta``."""
    if not n_code > 0:
        raise ValueError("n_code must be positive; the protocol aborts otherwise")
    if n_ph_u < 0:
        raise ValueError("n_ph_u must be non-negative")
    ratio = n_ph_u / n_code
    return n_code * (1.0 if ratio > 0.5 else binary_entropy(ratio)) + zeta


def _exact_sqrt(x: Fraction) -> Fraction:
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    with localcontext() as ctx:
        ctx.prec = 60
        return Fraction(Decimal(x.numerator).sqrt() / Decimal(x.denominator).sqrt())


def _pow2(exponent: float) -> Fraction:
    if float(exponent).is_integer():
        return Fraction(1, 2 ** int(exponent)) if exponent >= 0 else Fraction(2 ** int(-exponent))
    return Fraction(2.0 ** -exponent)


def security_parameter(zeta: float, zeta_prime: float, budget: DeviationBudget) -> float:
    """Composable security parameter ``2^-zeta' + sqrt(2) sqrt(3 eps1 + 3 eps2 + 2^-zeta)``.

    Evaluated in exact rational arithmetic (60-digit decimal for irrational
    square roots), so dyadic presets round-trip exactly.
    """
    secrecy_fail = (3 * Fraction(budget.epsilon1) + 3 * Fraction(budget.epsilon2)
                    + _pow2(zeta))
    return float(_pow2(zeta_prime) + _exact_sqrt(2 * secrecy_fail))


def key_length(params: ProtocolParams, counts: ObservedCounts, source: SourceSpec,
               method: Method | str, n_ec: float, *, asymptotic: bool = False) -> KeyRateResult:
    """Secret-key length after error correction, verification and privacy amplification.

    ``ell = n_code (1 - h(n_ph_u/n_code)) - zeta - n_ec - zeta'``. A
    non-positive length is reported as ``ell = 0`` with ``aborted`` set. In
    ``asymptotic`` mode ``zeta`` and ``zeta'`` are dropped along with the
    statistical deviations.
    """
    method = Method(method)
    if n_ec < 0:
        raise ValueError("n_ec must be non-negative")
    eps_sec = security_parameter(params.zeta, params.zeta_prime, params.budget)
    if not counts.n_code > 0 or (method is Method.KATO and not asymptotic
                                 and counts.n_det < 2):
        return KeyRateResult(math.inf, math.inf, n_ec, counts.n_code, -math.inf,
                             0.0, 0.0, eps_sec, method)
    bound = phase_error_bound_kato if method is Method.KATO else phase_error_bound_azuma
    n_ph_u = bound(params, counts, source, asymptotic=asymptotic)
    zeta, zeta_prime = (0.0, 0.0) if asymptotic else (params.zeta, params.zeta_prime)
    n_pa = privacy_amplification(counts.n_code, n_ph_u, zeta)
    raw = counts.n_code - n_pa - n_ec - zeta_prime
    ell = max(raw, 0.0)
    return KeyRateResult(n_ph_u, n_pa, n_ec, counts.n_code, raw, ell,
                         ell / (3.0 * params.n_em), eps_sec, method)
