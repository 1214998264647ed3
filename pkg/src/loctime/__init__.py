"""Monte Carlo laboratory for Brownian local time approximation schemes."""

from .analysis import (
    EnsembleErrorReport,
    RateReport,
    as_subsequence_check,
    fit_rate,
    l2_ensemble_error,
    sup_error,
)
from .estimators import (
    AlignmentError,
    Curve,
    EstimatorKind,
    FunctionSpec,
    MarginError,
    i_family,
    j_epsilon,
    level_sweep,
    phi,
    quadratic_variation_reg,
    remainder,
    smoothed_quarter,
)
from .oracle import (
    OracleKind,
    ito_indicator_integral,
    occupation_functional,
    occupation_local_time,
    tanaka_local_time,
    upcrossing_local_time,
)
from .paths import (
    Path,
    SigmaSpec,
    generate_brownian,
    generate_sigma_martingale,
    shift_level,
)

__all__ = [
    "AlignmentError",
    "Curve",
    "EnsembleErrorReport",
    "EstimatorKind",
    "FunctionSpec",
    "MarginError",
    "OracleKind",
    "Path",
    "RateReport",
    "SigmaSpec",
    "as_subsequence_check",
    "fit_rate",
    "generate_brownian",
    "generate_sigma_martingale",
    "i_family",
    "ito_indicator_integral",
    "j_epsilon",
    "l2_ensemble_error",
    "level_sweep",
    "occupation_functional",
    "occupation_local_time",
    "phi",
    "quadratic_variation_reg",
    "remainder",
    "shift_level",
    "smoothed_quarter",
    "sup_error",
    "tanaka_local_time",
    "upcrossing_local_time",
]
