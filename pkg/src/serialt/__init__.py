"""Serial-correlation-corrected t-tests for N-of-1 trials.

Level- and rate-change tests (paired and 2-sample) whose standard errors
and fractional degrees of freedom account for first-order autoregressive
correlation in the observations, plus the estimation, power-analysis, and
Monte Carlo machinery to validate them.
"""

__version__ = "0.1.0"

from .ar1 import (
    RHO_BOUND,
    CorrectionFactors,
    TestKind,
    factors_for_kind,
    level_factors,
    min_equal_m,
    oracle_factors,
    rate_factors,
    validate_sizes,
)
from .dist import MIN_DF, TailSide, nct_power, p_value, t_cdf, t_quantile, t_sf
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    MinimumSizeError,
    SerialTError,
    ValidationError,
)
from .estimate import (
    ModelFit,
    SerialCorrEstimate,
    Series,
    fit_level,
    fit_rate,
    pooled_corr,
    serial_corr,
    unbiased_variance,
)
from .mc import (
    EffectRatios,
    EmpiricalEffect,
    McCell,
    McConfig,
    McSummary,
    effect_ratio_cell,
    empirical_detectable_effect,
    gen_ar1,
    gen_paired,
    run_monte_carlo,
)
from .power import PowerQuery, detectable_effect, theoretical_power
from .ttests import (
    TestFlag,
    TestMethod,
    TestResult,
    paired_serial_level,
    paired_serial_rate,
    serial_test,
    two_sample_serial_level,
    two_sample_serial_rate,
    usual_paired_t,
    usual_slope_diff_t,
    usual_slope_t,
    usual_test,
    usual_two_sample_t,
)

__all__ = [
    "__version__",
    "RHO_BOUND",
    "MIN_DF",
    "CorrectionFactors",
    "TestKind",
    "TailSide",
    "Series",
    "ModelFit",
    "SerialCorrEstimate",
    "TestFlag",
    "TestMethod",
    "TestResult",
    "PowerQuery",
    "McCell",
    "McConfig",
    "McSummary",
    "EmpiricalEffect",
    "EffectRatios",
    "SerialTError",
    "DomainError",
    "MinimumSizeError",
    "DegenerateDataError",
    "ConvergenceError",
    "ValidationError",
    "level_factors",
    "rate_factors",
    "oracle_factors",
    "factors_for_kind",
    "validate_sizes",
    "min_equal_m",
    "t_cdf",
    "t_sf",
    "t_quantile",
    "p_value",
    "nct_power",
    "fit_level",
    "fit_rate",
    "serial_corr",
    "pooled_corr",
    "unbiased_variance",
    "paired_serial_level",
    "two_sample_serial_level",
    "paired_serial_rate",
    "two_sample_serial_rate",
    "usual_paired_t",
    "usual_two_sample_t",
    "usual_slope_t",
    "usual_slope_diff_t",
    "serial_test",
    "usual_test",
    "theoretical_power",
    "detectable_effect",
    "gen_ar1",
    "gen_paired",
    "run_monte_carlo",
    "empirical_detectable_effect",
    "effect_ratio_cell",
]
