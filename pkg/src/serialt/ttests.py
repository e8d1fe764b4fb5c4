"""The four serial t-tests and their usual (uncorrected) analogues.

Every serial statistic has the shape

    t = effect_hat / sqrt(variance-factor * s**2 / bias-factor)

with fractional degrees of freedom DF = (effective sample size) - p
evaluated at the estimated serial correlation.  Forcing that correlation
to zero reduces each serial test to its classical analogue exactly; the
``rho_override`` hook exists for that reduction and for power/Monte Carlo
work where the correlation is treated as known.

Conventions: paired tests analyze the difference series exactly as
supplied (the caller forms A - B); two-sample tests report
effect = first argument - second argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, Flag, auto

import numpy as np

from .ar1 import (
    RHO_BOUND,
    TestKind,
    level_factors,
    rate_factors,
    validate_sizes,
)
from .dist import TailSide, p_value
from .errors import DomainError
from .estimate import (
    ModelFit,
    Series,
    as_series,
    fit_level,
    fit_rate,
    pooled_corr,
    serial_corr,
)


class TestMethod(Enum):
    SERIAL = "serial"
    USUAL = "usual"


class TestFlag(Flag):
    NONE = 0
    CORRELATION_CLAMPED = auto()
    LOW_DF = auto()

    def names(self) -> list[str]:
        return [f.name for f in TestFlag if f is not TestFlag.NONE and f in self]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one test: statistic, fractional df, p-value, diagnostics."""

    statistic: float
    df: float
    p_value: float
    side: TailSide
    effect: float
    se: float
    rho_used: float
    method: TestMethod
    kind: TestKind
    flags: TestFlag = TestFlag.NONE


def _finish(
    effect: float,
    se: float,
    df: float,
    side: TailSide,
    rho_used: float,
    method: TestMethod,
    kind: TestKind,
    clamped: bool = False,
) -> TestResult:
    t = effect / se
    flags = TestFlag.NONE
    if clamped:
        flags |= TestFlag.CORRELATION_CLAMPED
    if df < 1.0:
        flags |= TestFlag.LOW_DF
    return TestResult(
        statistic=t,
        df=df,
        p_value=p_value(t, df, side),
        side=side,
        effect=effect,
        se=se,
        rho_used=rho_used,
        method=method,
        kind=kind,
        flags=flags,
    )


def _check_override(rho_override: float | None) -> float | None:
    if rho_override is None:
        return None
    rho = float(rho_override)
    if not (math.isfinite(rho) and abs(rho) <= RHO_BOUND):
        raise DomainError(f"correlation override must satisfy |rho| <= {RHO_BOUND}")
    return rho


def _estimate_r(fit: ModelFit, rho_override: float | None) -> tuple[float, bool]:
    if rho_override is not None:
        return rho_override, False
    est = serial_corr(fit)
    return est.r, est.clamped


def _pooled_r(
    fit_a: ModelFit, fit_b: ModelFit, rho_override: float | None
) -> tuple[float, bool]:
    if rho_override is not None:
        return rho_override, False
    est_a = serial_corr(fit_a)
    est_b = serial_corr(fit_b)
    return pooled_corr(est_a, est_b), est_a.clamped or est_b.clamped


def paired_serial_level(
    diffs: Series, side: TailSide, rho_override: float | None = None
) -> TestResult:
    """Level-change test on a paired difference series (m >= 4)."""
    diffs = as_series(diffs)
    validate_sizes(TestKind.PAIRED_LEVEL, diffs.m)
    rho_override = _check_override(rho_override)
    fit = fit_level(diffs)
    r, clamped = _estimate_r(fit, rho_override)
    f = level_factors(diffs.m, r)
    se = math.sqrt(f.c * fit.s2 / f.b)
    return _finish(
        fit.mu_hat, se, f.m_eff - 1.0, side, r,
        TestMethod.SERIAL, TestKind.PAIRED_LEVEL, clamped,
    )


def two_sample_serial_level(
    a: Series, b: Series, side: TailSide, rho_override: float | None = None
) -> TestResult:
    """Level-change test for two independent series (m_a, m_b >= 3, sum >= 7)."""
    a, b = as_series(a), as_series(b)
    validate_sizes(TestKind.TWO_SAMPLE_LEVEL, a.m, b.m)
    rho_override = _check_override(rho_override)
    fit_a, fit_b = fit_level(a), fit_level(b)
    rbar, clamped = _pooled_r(fit_a, fit_b, rho_override)
    fa = level_factors(a.m, rbar)
    fb = level_factors(b.m, rbar)
    s2 = (fit_a.ss_resid + fit_b.ss_resid) / (a.m + b.m - 2)
    se = math.sqrt((fa.c / fa.b + fb.c / fb.b) * s2)
    return _finish(
        fit_a.mu_hat - fit_b.mu_hat, se, fa.m_eff + fb.m_eff - 2.0, side, rbar,
        TestMethod.SERIAL, TestKind.TWO_SAMPLE_LEVEL, clamped,
    )


def paired_serial_rate(
    diffs: Series, side: TailSide, rho_override: float | None = None
) -> TestResult:
    """Rate-change test on a paired difference series (m >= 5)."""
    diffs = as_series(diffs)
    validate_sizes(TestKind.PAIRED_RATE, diffs.m)
    rho_override = _check_override(rho_override)
    fit = fit_rate(diffs)
    r, clamped = _estimate_r(fit, rho_override)
    f = rate_factors(diffs.m, r)
    se = math.sqrt(f.c * fit.s2 / f.b)
    return _finish(
        fit.beta_hat, se, f.m_eff - 2.0, side, r,
        TestMethod.SERIAL, TestKind.PAIRED_RATE, clamped,
    )


def two_sample_serial_rate(
    a: Series, b: Series, side: TailSide, rho_override: float | None = None
) -> TestResult:
    """Rate-change test for two independent series (m_a, m_b >= 4, sum >= 9)."""
    a, b = as_series(a), as_series(b)
    validate_sizes(TestKind.TWO_SAMPLE_RATE, a.m, b.m)
    rho_override = _check_override(rho_override)
    fit_a, fit_b = fit_rate(a), fit_rate(b)
    rbar, clamped = _pooled_r(fit_a, fit_b, rho_override)
    fa = rate_factors(a.m, rbar)
    fb = rate_factors(b.m, rbar)
    s2 = (fit_a.ss_resid + fit_b.ss_resid) / (a.m + b.m - 4)
    se = math.sqrt((fa.c / fa.b + fb.c / fb.b) * s2)
    return _finish(
        fit_a.beta_hat - fit_b.beta_hat, se, fa.m_eff + fb.m_eff - 4.0, side, rbar,
        TestMethod.SERIAL, TestKind.TWO_SAMPLE_RATE, clamped,
    )


def usual_paired_t(diffs: Series, side: TailSide) -> TestResult:
    """Classical one-sample t on the differences, ignoring serial correlation."""
    diffs = as_series(diffs)
    fit = fit_level(diffs)
    m = diffs.m
    se = math.sqrt(fit.s2 / m)
    return _finish(
        fit.mu_hat, se, float(m - 1), side, 0.0,
        TestMethod.USUAL, TestKind.PAIRED_LEVEL,
    )


def usual_two_sample_t(a: Series, b: Series, side: TailSide) -> TestResult:
    """Classical pooled-variance two-sample t."""
    a, b = as_series(a), as_series(b)
    fit_a, fit_b = fit_level(a), fit_level(b)
    s2 = (fit_a.ss_resid + fit_b.ss_resid) / (a.m + b.m - 2)
    se = math.sqrt(s2 * (1.0 / a.m + 1.0 / b.m))
    return _finish(
        fit_a.mu_hat - fit_b.mu_hat, se, float(a.m + b.m - 2), side, 0.0,
        TestMethod.USUAL, TestKind.TWO_SAMPLE_LEVEL,
    )


def usual_slope_t(series: Series, side: TailSide) -> TestResult:
    """Classical t-test of the slope in a simple linear regression."""
    series = as_series(series)
    fit = fit_rate(series)
    x = np.arange(1, series.m + 1, dtype=float) - (series.m + 1) / 2.0
    se = math.sqrt(fit.s2 / float(np.sum(x * x)))
    return _finish(
        fit.beta_hat, se, float(series.m - 2), side, 0.0,
        TestMethod.USUAL, TestKind.PAIRED_RATE,
    )


def usual_slope_diff_t(a: Series, b: Series, side: TailSide) -> TestResult:
    """Classical test for a difference of two regression slopes, pooled variance."""
    a, b = as_series(a), as_series(b)
    fit_a, fit_b = fit_rate(a), fit_rate(b)
    if a.m + b.m < 5:
        raise DomainError("difference-of-slopes test needs m_a + m_b >= 5")
    x_a = np.arange(1, a.m + 1, dtype=float) - (a.m + 1) / 2.0
    x_b = np.arange(1, b.m + 1, dtype=float) - (b.m + 1) / 2.0
    s2 = (fit_a.ss_resid + fit_b.ss_resid) / (a.m + b.m - 4)
    se = math.sqrt(s2 * (1.0 / float(np.sum(x_a * x_a)) + 1.0 / float(np.sum(x_b * x_b))))
    return _finish(
        fit_a.beta_hat - fit_b.beta_hat, se, float(a.m + b.m - 4), side, 0.0,
        TestMethod.USUAL, TestKind.TWO_SAMPLE_RATE,
    )


def serial_test(
    kind: TestKind,
    first: Series,
    second: Series | None = None,
    side: TailSide = TailSide.TWO_SIDED,
    rho_override: float | None = None,
) -> TestResult:
    """Dispatch to the serial test for `kind`."""
    if kind is TestKind.PAIRED_LEVEL:
        return paired_serial_level(first, side, rho_override)
    if kind is TestKind.PAIRED_RATE:
        return paired_serial_rate(first, side, rho_override)
    if second is None:
        raise DomainError(f"{kind.value} requires two series")
    if kind is TestKind.TWO_SAMPLE_LEVEL:
        return two_sample_serial_level(first, second, side, rho_override)
    return two_sample_serial_rate(first, second, side, rho_override)


def usual_test(
    kind: TestKind,
    first: Series,
    second: Series | None = None,
    side: TailSide = TailSide.TWO_SIDED,
) -> TestResult:
    """Dispatch to the usual analogue for `kind`."""
    if kind is TestKind.PAIRED_LEVEL:
        return usual_paired_t(first, side)
    if kind is TestKind.PAIRED_RATE:
        return usual_slope_t(first, side)
    if second is None:
        raise DomainError(f"{kind.value} requires two series")
    if kind is TestKind.TWO_SAMPLE_LEVEL:
        return usual_two_sample_t(first, second, side)
    return usual_slope_diff_t(first, second, side)
