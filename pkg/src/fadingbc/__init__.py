"""Capacity bounds for two-user layered erasure and fading Gaussian broadcast channels."""

from .bes import (
    AntipodalWord,
    LevelAssignment,
    achievable_rates as bes_rates,
    achievable_region,
    antipodal_expand,
    depth_of_level,
    epsilon_d,
    epsilon_hat,
    example_assignments,
    level_rate,
    nearest_constellation,
    nhat,
)
from .core import (
    DEFAULT_QUADRATURE,
    IntervalSet,
    QuadratureConfig,
    binary_entropy,
    g_function,
    integrate_ccdf_weighted,
    mu_gamma,
    q_function,
)
from .erasure import (
    ErasurePmf,
    LevelPartition,
    capacity_region,
    converse_weighted_rate,
    critical_weights,
    enhance_channel,
    erasure_identity_check,
    is_degraded,
    partition_levels,
)
from .errors import ContractError, DomainError, NumericError
from .gap import QuantizationGrid, empirical_gap, minimize_gap, quantized_outer, universal_gap
from .gaussian import (
    FadingDist,
    RatePoint,
    enhance_continuous,
    ergodic_capacity,
    outer_extreme_point,
    outer_region,
    partition_states,
)
from .regions import RateRegionBoundary
from .sim import SimReport, simulate_bes_detector, simulate_bes_link, simulate_erasure_scheme

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "achievable_region",
    "antipodal_expand",
    "AntipodalWord",
    "bes_rates",
    "binary_entropy",
    "capacity_region",
    "ContractError",
    "converse_weighted_rate",
    "critical_weights",
    "DEFAULT_QUADRATURE",
    "depth_of_level",
    "DomainError",
    "empirical_gap",
    "enhance_channel",
    "enhance_continuous",
    "epsilon_d",
    "epsilon_hat",
    "erasure_identity_check",
    "ErasurePmf",
    "ergodic_capacity",
    "example_assignments",
    "FadingDist",
    "g_function",
    "integrate_ccdf_weighted",
    "IntervalSet",
    "is_degraded",
    "level_rate",
    "LevelAssignment",
    "LevelPartition",
    "minimize_gap",
    "mu_gamma",
    "nearest_constellation",
    "nhat",
    "NumericError",
    "outer_extreme_point",
    "outer_region",
    "partition_levels",
    "partition_states",
    "q_function",
    "QuadratureConfig",
    "QuantizationGrid",
    "quantized_outer",
    "RatePoint",
    "RateRegionBoundary",
    "SimReport",
    "simulate_bes_detector",
    "simulate_bes_link",
    "simulate_erasure_scheme",
    "universal_gap",
]
