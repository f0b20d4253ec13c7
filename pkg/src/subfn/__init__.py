"""Tight completions, divergence, and value-query planning for partially
known subadditive set functions."""

__version__ = "0.1.0"

from .completions import (
    Bounds,
    bounds_for,
    ca_bounds,
    s_bounds,
    sam_bounds,
    sam_upper_iterative,
    ss_bounds,
    xos_bounds,
)
from .core import (
    FunctionClass,
    GroundSet,
    IncompleteSetFunction,
    KnownMask,
    SetFunction,
    check_class,
    minimal_information,
    normalize,
)
from .divergence import (
    DivergenceReport,
    audit_divergence_supermodularity,
    divergence,
)
from .distributions import DistributionSpec, pointmass, sample
from .planners import (
    PlanConfig,
    PlanResult,
    offline_greedy,
    offline_optimal,
    oracle_greedy,
    oracle_optimal,
    random_plan,
)
from .sketch import AlphaReport, alpha_ratio, sketch_experiment

__all__ = [
    "__version__",
    "AlphaReport",
    "Bounds",
    "DistributionSpec",
    "DivergenceReport",
    "FunctionClass",
    "GroundSet",
    "IncompleteSetFunction",
    "KnownMask",
    "PlanConfig",
    "PlanResult",
    "SetFunction",
    "alpha_ratio",
    "audit_divergence_supermodularity",
    "bounds_for",
    "ca_bounds",
    "check_class",
    "divergence",
    "minimal_information",
    "normalize",
    "offline_greedy",
    "offline_optimal",
    "oracle_greedy",
    "oracle_optimal",
    "pointmass",
    "random_plan",
    "s_bounds",
    "sample",
    "sam_bounds",
    "sam_upper_iterative",
    "sketch_experiment",
    "ss_bounds",
    "xos_bounds",
]
