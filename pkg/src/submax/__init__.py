"""Deterministic algorithms for non-monotone submodular maximisation.

Matroid constraints use a derandomised random greedy; a knapsack uses twin
greedy (optionally lazy) behind a size-two enumeration; linear packing
constraints use multiplicative updates.  :mod:`submax.exact` supplies
brute-force optima for checking all of them.
"""

from .core import (
    CutFunction,
    CutFunctionSpec,
    ExplicitTableSpec,
    GroundSet,
    SetFunction,
    TableFunction,
    TightExample,
    TightExampleSpec,
    build_function,
    check_nonnegative,
    check_submodular,
    make_tight_example,
    marginal,
    random_cut_instance,
    random_table_instance,
)
from .errors import (
    InfeasibleError,
    InvalidElementError,
    InvalidSpecError,
    InvariantViolation,
    ResourceLimitError,
    SubmaxError,
)
from .exact import ExactResult, brute_force_opt, brute_force_opt_reversed, ratio_verdict
from .knapsack_solver import (
    KnapsackConstraint,
    TieBreak,
    enumeration_wrapper,
    threshold_twin_greedy,
    twin_greedy,
)
from .matroid import PartitionMatroid, UniformMatroid, exchange_bijection, extend_with_dummies, max_weight_base, rank_of
from .matroid_solver import SupportDistribution, derandomized_greedy, probability_absent, random_greedy
from .packing_solver import (
    PackingConstraint,
    multiplicative_updates,
    packing_main,
    usm_double_greedy,
    usm_exhaustive,
)

__all__ = [
    "CutFunction",
    "CutFunctionSpec",
    "ExactResult",
    "ExplicitTableSpec",
    "GroundSet",
    "InfeasibleError",
    "InvalidElementError",
    "InvalidSpecError",
    "InvariantViolation",
    "KnapsackConstraint",
    "PackingConstraint",
    "PartitionMatroid",
    "ResourceLimitError",
    "SetFunction",
    "SubmaxError",
    "SupportDistribution",
    "TableFunction",
    "TieBreak",
    "TightExample",
    "TightExampleSpec",
    "UniformMatroid",
    "brute_force_opt",
    "brute_force_opt_reversed",
    "build_function",
    "check_nonnegative",
    "check_submodular",
    "derandomized_greedy",
    "enumeration_wrapper",
    "exchange_bijection",
    "extend_with_dummies",
    "make_tight_example",
    "marginal",
    "max_weight_base",
    "multiplicative_updates",
    "packing_main",
    "probability_absent",
    "random_cut_instance",
    "random_greedy",
    "random_table_instance",
    "rank_of",
    "ratio_verdict",
    "threshold_twin_greedy",
    "twin_greedy",
    "usm_double_greedy",
    "usm_exhaustive",
]
