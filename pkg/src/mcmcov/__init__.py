"""Asymptotic covariance estimation for multivariate MCMC output.

Batch means, overlapping batch means, and lag-window generalizations, with
MSE-optimal batch size selection via autoregressive fits, a nonparametric
pilot, or the lag rule. A VAR(1) oracle with closed-form ground truth backs
the verification suite, and a CLI exposes estimation, batch size selection,
simulation, and the replication benchmark.
"""

from ._version import __version__
from .api import MonteCarloCovariance, select_batch_size
from .batch_size import (
    ArFit,
    BatchSizeResult,
    PilotEstimates,
    ar_bias_constant,
    ar_long_run_variance,
    ar_pilot,
    correlation_cutoff,
    fit_ar,
    lag_batch_size,
    nonparametric_pilot,
    optimal_batch_size,
    yule_walker,
)
from .chain import (
    AutocovSeries,
    load_csv,
    max_component_correlation,
    mean_vector,
    sample_autocovariance,
)
from .estimators import (
    CovEstimate,
    batch_means,
    flat_top_batch_means,
    flat_top_obm,
    generalized_obm,
    overlapping_batch_means,
)
from .inference import (
    ConfidenceRegion,
    chi2_quantile,
    confidence_region,
    effective_sample_size,
)
from .var1 import (
    Var1Process,
    bias_matrix,
    long_run_cov,
    optimal_batch_coefficient,
    random_coef,
    simulate,
    stationary_cov,
    var1_process,
)
from .windows import (
    BARTLETT,
    FLAT_TOP,
    TUKEY_HANNING,
    LagWindow,
    MseConstants,
    mse_constants,
    verify_window_conditions,
)

__all__ = [
    "__version__",
    "MonteCarloCovariance",
    "select_batch_size",
    "ArFit",
    "BatchSizeResult",
    "PilotEstimates",
    "ar_bias_constant",
    "ar_long_run_variance",
    "ar_pilot",
    "correlation_cutoff",
    "fit_ar",
    "lag_batch_size",
    "nonparametric_pilot",
    "optimal_batch_size",
    "yule_walker",
    "AutocovSeries",
    "load_csv",
    "max_component_correlation",
    "mean_vector",
    "sample_autocovariance",
    "CovEstimate",
    "batch_means",
    "flat_top_batch_means",
    "flat_top_obm",
    "generalized_obm",
    "overlapping_batch_means",
    "ConfidenceRegion",
    "chi2_quantile",
    "confidence_region",
    "effective_sample_size",
    "Var1Process",
    "bias_matrix",
    "long_run_cov",
    "optimal_batch_coefficient",
    "random_coef",
    "simulate",
    "stationary_cov",
    "var1_process",
    "BARTLETT",
    "FLAT_TOP",
    "TUKEY_HANNING",
    "LagWindow",
    "MseConstants",
    "mse_constants",
    "verify_window_conditions",
]
