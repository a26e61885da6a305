"""Finite-trajectory digit statistics for continued-fraction algorithms."""

from .homography import Homography
from .maps import (
    GAUSS,
    BRUN2,
    BRUN3,
    JP2,
    BrunDigit,
    GaussDigit,
    JPDigit,
    MapDescriptor,
    TerminalStateError,
    brun,
    brun_forward,
    compose,
    compose_string,
    gauss_forward,
    jp_forward,
)
from .orbits import (
    BudgetError,
    NotExpandableError,
    RationalPoint,
    TrajectoryRecord,
    brun_gcd_digits,
    enumerate_trajectories,
    euclid_digits,
    jp_digits,
)
from .stats import (
    EnsembleTable,
    TargetSet,
    centre,
    clt_summary,
    count_digits,
    dirichlet_partial_sum,
    empirical_lambda,
    growth_constant,
    ks_distance,
    ldp_tail,
    moment_table,
)
from .spectral import (
    GridFunction,
    OperatorParams,
    SpectralResult,
    apply_operator,
    covariance_matrix,
    eigenvalue_derivatives,
    frequency_constants,
    invariant_density,
    leading_eigenvalue,
    nonarithmeticity_witnesses,
)

__all__ = [
    "Homography",
    "MapDescriptor",
    "GaussDigit",
    "BrunDigit",
    "JPDigit",
    "TerminalStateError",
    "GAUSS",
    "BRUN2",
    "BRUN3",
    "JP2",
    "brun",
    "gauss_forward",
    "brun_forward",
    "jp_forward",
    "compose",
    "compose_string",
    "BudgetError",
    "NotExpandableError",
    "RationalPoint",
    "TrajectoryRecord",
    "euclid_digits",
    "brun_gcd_digits",
    "jp_digits",
    "enumerate_trajectories",
    "EnsembleTable",
    "TargetSet",
    "count_digits",
    "centre",
    "empirical_lambda",
    "growth_constant",
    "clt_summary",
    "ks_distance",
    "ldp_tail",
    "moment_table",
    "dirichlet_partial_sum",
    "GridFunction",
    "OperatorParams",
    "SpectralResult",
    "apply_operator",
    "leading_eigenvalue",
    "invariant_density",
    "eigenvalue_derivatives",
    "frequency_constants",
    "covariance_matrix",
    "nonarithmeticity_witnesses",
]

__version__ = "0.1.0"
