"""Expected-count channel model, error-correction cost and fibre loss."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import BLOCK_PULSES, binary_entropy
from .finite_key import ObservedCounts

EC_INEFFICIENCY = 1.16


@dataclass(frozen=True)
class ChannelSpec:
    """Link and detector assumptions.

    Attributes:
        eta: Overall transmission including detector efficiency.
        e_bit: Bit-error rate assumed in the sample rounds.
        rep_rate_hz: Pulse repetition rate, used only for wall-clock time.
        fiber_loss_db_per_km: Fibre attenuation.
    """

    eta: float = 1.0
    e_bit: float = 0.01
    rep_rate_hz: float = 1e9
    fiber_loss_db_per_km: float = 0.2

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not 0 <= self.e_bit <= 1:
            raise ValueError("e_bit must lie in [0, 1]")
        if not self.rep_rate_hz > 0:
            raise ValueError("rep_rate_hz must be positive")
        if not self.fiber_loss_db_per_km >= 0:
            raise ValueError("fiber_loss_db_per_km must be non-negative")


def detection_probability(eta: float, mu: float) -> float:
    """Probability that a block yields exactly one click in slots 1-2."""
    x = 2.0 * eta * mu
    return x * math.exp(-x)


def expected_counts(spec: ChannelSpec, mu: float, t: float, n_em: float) -> ObservedCounts:
    """Expected tallies for ``n_em`` blocks; real-valued, not rounded."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    if not n_em > 0:
        raise ValueError("n_em must be positive")
    n_det = n_em * detection_probability(spec.eta, mu)
    n_code = t * n_det
    return ObservedCounts(n_det, n_code, n_det - n_code, spec.e_bit)


def ec_cost(n_code: float, e_bit: float, inefficiency: float = EC_INEFFICIENCY) -> float:
    """Bits leaked by error correction, ``1.16 * n_code * h(e_bit)``."""
    if n_code < 0:
        raise ValueError("n_code must be non-negative")
    return inefficiency * n_code * binary_entropy(e_bit)


def eta_from_distance(l_km: float, spec: ChannelSpec | None = None) -> float:
    """Transmission over ``l_km`` of fibre behind a 50 % efficient detector."""
    if not l_km >= 0:
        raise ValueError("distance must be non-negative")
    loss = (spec or ChannelSpec()).fiber_loss_db_per_km
    return 0.5 * 10.0 ** (-loss * l_km / 10.0)


def run_duration_s(n_em: float, spec: ChannelSpec) -> float:
    """Wall-clock seconds to emit ``n_em`` blocks at the repetition rate."""
    return BLOCK_PULSES * n_em / spec.rep_rate_hz
