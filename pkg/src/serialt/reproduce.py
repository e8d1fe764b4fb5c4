"""Recompute the published examples and figure data from bundled inputs.

Shared by the CLI `reproduce` command and the acceptance suite, so both
always agree on what "reproduction" means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import datasets
from .ar1 import TestKind
from .dist import TailSide
from .errors import ConvergenceError
from .estimate import fit_level, fit_rate, pooled_corr, serial_corr
from .mc import (
    McConfig,
    McSummary,
    default_m_values,
    effect_ratio_cell,
    run_monte_carlo,
)
from .ttests import (
    TestResult,
    paired_serial_level,
    paired_serial_rate,
    two_sample_serial_level,
    two_sample_serial_rate,
    usual_paired_t,
)

#: Default master seed for figure-data reproduction runs.
DEFAULT_SEED = 20250808

ALL_KINDS = (
    TestKind.PAIRED_LEVEL,
    TestKind.TWO_SAMPLE_LEVEL,
    TestKind.PAIRED_RATE,
    TestKind.TWO_SAMPLE_RATE,
)


@dataclass(frozen=True)
class Table1Row:
    patient: int
    m: int
    mean: float
    sd: float
    fuller_r: float
    usual_p: float
    serial_p: float


def table1_rows() -> tuple[Table1Row, ...]:
    """Per-patient level-change statistics, one-sided upper tests."""
    rows = []
    for patient in datasets.TABLE1_PATIENTS:
        series = datasets.load(f"table1/patient{patient}")
        fit = fit_level(series)
        est = serial_corr(fit)
        serial = paired_serial_level(series, TailSide.UPPER)
        usual = usual_paired_t(series, TailSide.UPPER)
        rows.append(
            Table1Row(
                patient=patient,
                m=series.m,
                mean=fit.mu_hat,
                sd=math.sqrt(fit.s2),
                fuller_r=est.r,
                usual_p=usual.p_value,
                serial_p=serial.p_value,
            )
        )
    return tuple(rows)


@dataclass(frozen=True)
class Table2Estimate:
    model: str        # "level" | "rate"
    series: str       # "two-sample" (pre/post pooled) | "difference"
    s: float
    r: float


@dataclass(frozen=True)
class Table2Results:
    estimates: tuple[Table2Estimate, ...]
    tests: tuple[TestResult, ...]


def table2_results() -> Table2Results:
    """Pooled/difference s and r plus the four two-sided tests."""
    pre, post = datasets.load("table2/prepost")
    diff = datasets.load("table2/diff")

    fits_level = (fit_level(pre), fit_level(post))
    fits_rate = (fit_rate(pre), fit_rate(post))
    pooled_s_level = math.sqrt(
        (fits_level[0].ss_resid + fits_level[1].ss_resid) / (pre.m + post.m - 2)
    )
    pooled_s_rate = math.sqrt(
        (fits_rate[0].ss_resid + fits_rate[1].ss_resid) / (pre.m + post.m - 4)
    )
    pooled_r_level = pooled_corr(*(serial_corr(f) for f in fits_level))
    pooled_r_rate = pooled_corr(*(serial_corr(f) for f in fits_rate))

    diff_level = fit_level(diff)
    diff_rate = fit_rate(diff)
    estimates = (
        Table2Estimate("level", "two-sample", pooled_s_level, pooled_r_level),
        Table2Estimate("rate", "two-sample", pooled_s_rate, pooled_r_rate),
        Table2Estimate("level", "difference", math.sqrt(diff_level.s2),
                       serial_corr(diff_level).r),
        Table2Estimate("rate", "difference", math.sqrt(diff_rate.s2),
                       serial_corr(diff_rate).r),
    )
    tests = (
        two_sample_serial_level(pre, post, TailSide.TWO_SIDED),
        two_sample_serial_rate(pre, post, TailSide.TWO_SIDED),
        paired_serial_level(diff, TailSide.TWO_SIDED),
        paired_serial_rate(diff, TailSide.TWO_SIDED),
    )
    return Table2Results(estimates=estimates, tests=tests)


def figure_type1(kind: TestKind, seed: int = DEFAULT_SEED,
                 replicates: int = 10_000, max_workers: int | None = None) -> McSummary:
    """Type I error grid for one kind at the published m/rho grid."""
    config = McConfig(kind=kind, seed=seed, replicates=replicates, effect=None)
    return run_monte_carlo(config, max_workers=max_workers)


@dataclass(frozen=True)
class RatioRow:
    kind: TestKind
    m: int
    rho: float
    rho_pair: float
    theoretical: float | None
    serial_delta: float | None
    usual_delta: float | None
    serial_ratio: float | None
    usual_ratio: float | None
    converged: bool


def figure_ratios(kind: TestKind, seed: int = DEFAULT_SEED,
                  replicates: int = 10_000,
                  m_values: tuple[int, ...] | None = None,
                  rho_values: tuple[float, ...] = (-0.33, 0.0, 0.33, 0.67),
                  rho_pair_values: tuple[float, ...] | None = None,
                  max_workers: int | None = None) -> tuple[RatioRow, ...]:
    """Detectable-effect ratio grid; unconverged cells are kept, flagged."""
    from concurrent.futures import ThreadPoolExecutor

    if m_values is None:
        m_values = default_m_values(kind)
    if rho_pair_values is None:
        rho_pair_values = (0.33, 0.67) if kind.is_paired else (0.0,)
    grid = [
        (m, rho, rp)
        for m in m_values
        for rho in rho_values
        for rp in rho_pair_values
    ]

    def one(cell) -> RatioRow:
        m, rho, rp = cell
        try:
            ratios = effect_ratio_cell(
                kind, m, rho, rp, seed=seed, replicates=replicates
            )
        except ConvergenceError:
            return RatioRow(kind, m, rho, rp, None, None, None, None, None, False)
        return RatioRow(
            kind, m, rho, rp,
            ratios.theoretical, ratios.serial.delta, ratios.usual.delta,
            ratios.serial_ratio, ratios.usual_ratio, True,
        )

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return tuple(pool.map(one, grid))
    return tuple(one(cell) for cell in grid)
