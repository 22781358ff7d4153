"""Finite-key security analysis for three-pulse differential-phase-shift QKD."""

from ._core import BACKEND
from .channel import (
    EC_INEFFICIENCY,
    ChannelSpec,
    ec_cost,
    eta_from_distance,
    expected_counts,
    run_duration_s,
)
from .concentration import (
    LAMBDA,
    DeviationBudget,
    KatoCoefficients,
    azuma_delta,
    bounded_difference,
    chernoff_gamma,
    kato_omega,
    kato_prime,
    kato_star,
    kato_upper_bound,
)
from .entropy import SourceSpec, binary_entropy, poisson_block_tail, poisson_tail
from .finite_key import (
    KeyRateResult,
    Method,
    ObservedCounts,
    ProtocolParams,
    key_length,
    phase_error_bound_azuma,
    phase_error_bound_kato,
    privacy_amplification,
    security_parameter,
)
from .optimize import (
    BoundaryOptimumWarning,
    CrossoverResult,
    OptimizationResult,
    evaluate,
    find_crossover,
    optimize_rate,
)

__version__ = "0.1.0"
