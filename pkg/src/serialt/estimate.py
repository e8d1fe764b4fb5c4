"""OLS fits per design, residuals, and serial-correlation estimation.

The correlation estimator works on residuals from the level or rate fit:
with mean-zero residuals the ML estimator simplifies to

    rho_hat = sum_{j=2..m} e_j e_{j-1} / sum_{j=1..m} e_j**2

(the denominator runs over all m residuals), and the small-sample bias
correction adds (1 - rho_hat**2) / (m - 1).  The corrected estimate is
clamped to the factor-evaluation bound and the clamp is flagged so it can
surface in downstream diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ar1 import RHO_BOUND, CorrectionFactors
from .errors import DegenerateDataError, DomainError, MinimumSizeError

#: Residual sums of squares at or below (1e-12 * scale)^2 * m are treated
#: as zero variability; exact zeros are unreliable in float arithmetic.
_DEGENERATE_REL = 1e-12


@dataclass(frozen=True, eq=False)
class Series:
    """One treatment's ordered observations from a single individual."""

    values: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise DomainError(f"series must be one-dimensional, got shape {arr.shape}")
        if arr.size < 2:
            raise MinimumSizeError(f"series needs at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("series values must all be finite")
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return self.values.size


def as_series(data, label: str | None = None) -> Series:
    """Coerce array-likes to Series; pass Series through unchanged."""
    if isinstance(data, Series):
        return data
    return Series(np.asarray(data, dtype=float), label=label)


@dataclass(frozen=True, eq=False)
class ModelFit:
    """OLS fit of a level or rate model to one series."""

    mu_hat: float
    beta_hat: float | None
    s2: float
    residuals: np.ndarray = field(repr=False)
    p: int

    @property
    def m(self) -> int:
        return self.residuals.size

    @property
    def ss_resid(self) -> float:
        return float(np.sum(self.residuals * self.residuals))


@dataclass(frozen=True)
class SerialCorrEstimate:
    """Raw ML estimate and its bias-corrected, clamped version."""

    rho_hat: float
    r: float
    m: int
    clamped: bool


def _degenerate(ss: float, values: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(values))))
    return ss <= (_DEGENERATE_REL * scale) ** 2 * values.size


def centered_index(m: int) -> np.ndarray:
    """The rate design's regressor: 1..m centered about zero."""
    return np.arange(1, m + 1, dtype=float) - (m + 1) / 2.0


def fit_level(series: Series) -> ModelFit:
    """Constant-mean fit: mu_hat is the sample mean, s2 uses m - 1."""
    series = as_series(series)
    y = series.values
    mu = float(np.mean(y))
    e = y - mu
    ss = float(np.sum(e * e))
    if _degenerate(ss, y):
        raise DegenerateDataError("series has no variability about its mean")
    return ModelFit(mu_hat=mu, beta_hat=None, s2=ss / (series.m - 1), residuals=e, p=1)


def fit_rate(series: Series) -> ModelFit:
    """Linear-trend fit on the centered index; s2 uses m - 2."""
    series = as_series(series)
    m = series.m
    if m < 3:
        raise MinimumSizeError(f"rate fit needs m >= 3, got {m}")
    y = series.values
    x = centered_index(m)
    sxx = float(np.sum(x * x))
    beta = float(np.sum(x * y)) / sxx
    mu = float(np.mean(y))
    e = y - mu - beta * x
    ss = float(np.sum(e * e))
    if _degenerate(ss, y):
        raise DegenerateDataError("series has no variability about its trend")
    return ModelFit(mu_hat=mu, beta_hat=beta, s2=ss / (m - 2), residuals=e, p=2)


def serial_corr(fit: ModelFit) -> SerialCorrEstimate:
    """Simplified ML lag-1 correlation of the fit's residuals, bias-corrected."""
    e = fit.residuals
    m = e.size
    if m < 3:
        raise MinimumSizeError(f"serial correlation needs m >= 3 residuals, got {m}")
    ss = float(np.sum(e * e))
    if ss <= 0.0:
        raise DegenerateDataError("residuals have zero sum of squares")
    rho_hat = float(np.sum(e[1:] * e[:-1])) / ss
    r_raw = rho_hat + (1.0 - rho_hat * rho_hat) / (m - 1)
    clamped = abs(r_raw) > RHO_BOUND
    r = min(max(r_raw, -RHO_BOUND), RHO_BOUND)
    return SerialCorrEstimate(rho_hat=rho_hat, r=r, m=m, clamped=clamped)


def pooled_corr(est_a: SerialCorrEstimate, est_b: SerialCorrEstimate) -> float:
    """Length-weighted average of two per-series estimates, clamped."""
    rbar = (est_a.m * est_a.r + est_b.m * est_b.r) / (est_a.m + est_b.m)
    return min(max(rbar, -RHO_BOUND), RHO_BOUND)


def unbiased_variance(s2: float, factors: CorrectionFactors) -> float:
    """Remove the serial-correlation bias from the OLS variance estimate."""
    s2 = float(s2)
    if s2 < 0.0:
        raise DomainError(f"s2 must be nonnegative, got {s2}")
    if factors.b <= 0.0:
        raise DomainError(f"bias factor must be positive, got {factors.b}")
    return s2 / factors.b
