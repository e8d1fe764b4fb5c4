"""AR(1) data generation and the Monte Carlo evaluation harness.

Simulated series are stationary AR(1): the first draw already has the
marginal variance sigma**2 and innovations are scaled by
sigma * sqrt(1 - rho**2).  Paired series share bivariate-normal
innovations with correlation rho_pair, which makes the contemporaneous
pair correlation exactly rho_pair at every index and keeps the
difference series AR(1) with the same rho and marginal variance
2 * sigma**2 * (1 - rho_pair).

Reproducibility contract: every cell (and every bisection probe) draws
from a counter-based generator keyed on (seed, kind, m, rho, rho_pair,
context, probe), so results are bit-identical across runs and across any
degree of parallelism; worker threads only change scheduling, never
streams.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .ar1 import TestKind, min_equal_m, validate_sizes
from .dist import TailSide, p_value_array
from .errors import ConvergenceError, DomainError
from .estimate import Series
from .power import PowerQuery, detectable_effect
from .ttests import TestMethod

_MASK64 = (1 << 64) - 1

_KIND_IDS = {
    TestKind.PAIRED_LEVEL: 0,
    TestKind.TWO_SAMPLE_LEVEL: 1,
    TestKind.PAIRED_RATE: 2,
    TestKind.TWO_SAMPLE_RATE: 3,
}

# Context tags keep the main run and each bisection method on disjoint streams.
_TAG_MAIN = 0
_TAG_SERIAL_PROBE = 1
_TAG_USUAL_PROBE = 2

#: Raw effect used when a config asks for the "paper" mean structure.
PAPER_EFFECT_RAW = 1.0


def _encode(value: float) -> int:
    # SeedSequence entropy wants nonnegative ints; 1e9 resolution is ample
    # for grid values given in at most a few decimals.
    return int(round((float(value) + 8.0) * 1_000_000_000))


def _rng(seed: int, kind: TestKind, m: int, rho: float, rho_pair: float,
         tag: int, probe: int) -> np.random.Generator:
    entropy = (
        int(seed) & _MASK64,
        _KIND_IDS[kind],
        int(m),
        _encode(rho),
        _encode(rho_pair),
        int(tag),
        int(probe),
    )
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _ar1_block(rng: np.random.Generator, n: int, m: int, rho: float,
               sigma: float) -> np.ndarray:
    e = rng.standard_normal((n, m))
    z = np.empty((n, m))
    z[:, 0] = sigma * e[:, 0]
    s = sigma * math.sqrt(1.0 - rho * rho)
    for j in range(1, m):
        z[:, j] = rho * z[:, j - 1] + s * e[:, j]
    return z


def _paired_blocks(rng: np.random.Generator, n: int, m: int, rho: float,
                   rho_pair: float, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    ea = rng.standard_normal((n, m))
    eb = rng.standard_normal((n, m))
    if rho_pair != 0.0:
        eb = rho_pair * ea + math.sqrt(1.0 - rho_pair * rho_pair) * eb
    za = np.empty((n, m))
    zb = np.empty((n, m))
    za[:, 0] = sigma * ea[:, 0]
    zb[:, 0] = sigma * eb[:, 0]
    s = sigma * math.sqrt(1.0 - rho * rho)
    for j in range(1, m):
        za[:, j] = rho * za[:, j - 1] + s * ea[:, j]
        zb[:, j] = rho * zb[:, j - 1] + s * eb[:, j]
    return za, zb


def _check_gen_args(rho: float, sigma: float) -> None:
    if not abs(rho) < 1.0:
        raise DomainError(f"AR(1) generation needs |rho| < 1, got {rho}")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma}")


def gen_ar1(m: int, rho: float, sigma: float, mean_sequence,
            rng: np.random.Generator) -> Series:
    """One stationary AR(1) series around the given mean sequence."""
    _check_gen_args(rho, sigma)
    mean = np.broadcast_to(np.asarray(mean_sequence, dtype=float), (m,))
    z = _ar1_block(rng, 1, m, rho, sigma)[0]
    return Series(mean + z)


def gen_paired(m: int, rho: float, rho_pair: float, sigma: float,
               mean_a, mean_b, rng: np.random.Generator) -> tuple[Series, Series]:
    """Two AR(1) series whose innovation pairs are correlated rho_pair."""
    _check_gen_args(rho, sigma)
    if not 0.0 <= rho_pair < 1.0:
        raise DomainError(f"rho_pair must be in [0, 1), got {rho_pair}")
    ma = np.broadcast_to(np.asarray(mean_a, dtype=float), (m,))
    mb = np.broadcast_to(np.asarray(mean_b, dtype=float), (m,))
    za, zb = _paired_blocks(rng, 1, m, rho, rho_pair, sigma)
    return Series(ma + za[0], label="a"), Series(mb + zb[0], label="b")


def default_m_values(kind: TestKind) -> tuple[int, ...]:
    """Kind minimum through 12, plus the large-sample checkpoints."""
    return tuple(range(min_equal_m(kind), 13)) + (30, 50, 100)


def default_rho_pair_values(kind: TestKind) -> tuple[float, ...]:
    return (0.33, 0.67) if kind.is_paired else (0.0,)


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo study: a kind, its grid, and the replication setup.

    ``effect`` is None for Type I runs, a number interpreted as delta in
    units of the analyzed model's sigma, or the string "paper" for the
    raw unit effect of the published mean structures.
    """

    kind: TestKind
    seed: int
    m_values: tuple[int, ...] = None  # type: ignore[assignment]
    rho_values: tuple[float, ...] = (-0.33, 0.0, 0.33, 0.67)
    rho_pair_values: tuple[float, ...] = None  # type: ignore[assignment]
    sigma2: float = 1.0
    replicates: int = 10_000
    alpha: float = 0.05
    side: TailSide = TailSide.UPPER
    effect: float | str | None = None

    def __post_init__(self) -> None:
        if self.m_values is None:
            object.__setattr__(self, "m_values", default_m_values(self.kind))
        else:
            object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        if self.rho_pair_values is None:
            object.__setattr__(
                self, "rho_pair_values", default_rho_pair_values(self.kind)
            )
        else:
            object.__setattr__(
                self, "rho_pair_values", tuple(float(x) for x in self.rho_pair_values)
            )
        object.__setattr__(self, "rho_values", tuple(float(x) for x in self.rho_values))
        if self.replicates < 1:
            raise DomainError(f"replicates must be >= 1, got {self.replicates}")
        if not 0.0 < self.alpha <= 0.5:
            raise DomainError(f"alpha must be in (0, 0.5], got {self.alpha}")
        if self.sigma2 <= 0.0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        for rho in self.rho_values:
            if not abs(rho) < 1.0:
                raise DomainError(f"rho values must lie in (-1, 1), got {rho}")
        for rp in self.rho_pair_values:
            if not 0.0 <= rp < 1.0:
                raise DomainError(f"rho_pair values must lie in [0, 1), got {rp}")
        if isinstance(self.effect, str) and self.effect != "paper":
            raise DomainError(f"effect must be null, a number, or 'paper', got {self.effect!r}")
        for m in self.m_values:
            if self.kind.is_paired:
                validate_sizes(self.kind, m)
            else:
                validate_sizes(self.kind, m, m)


@dataclass(frozen=True)
class McCell:
    """Rejection rates for one (kind, m, rho, rho_pair) configuration."""

    kind: TestKind
    m: int
    rho: float
    rho_pair: float
    replicates: int
    n_degenerate: int
    serial_reject: float
    usual_reject: float
    serial_se: float
    usual_se: float
    mean_r: float


@dataclass(frozen=True)
class McSummary:
    config: McConfig
    cells: tuple[McCell, ...] = field(default_factory=tuple)


def _delta_raw(kind: TestKind, effect: float | str | None, sigma: float,
               rho_pair: float) -> float:
    """Translate the configured effect into raw response units."""
    if effect is None:
        return 0.0
    if effect == "paper":
        return PAPER_EFFECT_RAW
    sd_model = sigma * math.sqrt(2.0 * (1.0 - rho_pair)) if kind.is_paired else sigma
    return float(effect) * sd_model


def _simulate_tests(kind: TestKind, m: int, rho: float, rho_pair: float,
                    sigma: float, n: int, delta_raw: float,
                    rng: np.random.Generator):
    """Generate one cell's replicates and run serial + usual tests on each."""
    impl = backend.impl
    za, zb = _paired_blocks(rng, n, m, rho, rho_pair, sigma)
    if kind.is_level:
        mean_a = 1.0 + delta_raw
        mean_b = 1.0
        df_usual = float(m - 1) if kind.is_paired else float(2 * m - 2)
        if kind.is_paired:
            t_s, df_s, r, t_u, degen = impl.paired_level(za + mean_a - (zb + mean_b))
        else:
            t_s, df_s, r, t_u, degen = impl.two_sample_level(za + mean_a, zb + mean_b)
    else:
        x = np.arange(1, m + 1, dtype=float) - (m + 1) / 2.0
        trend_a = (1.0 + delta_raw) * x
        trend_b = 1.0 * x
        df_usual = float(m - 2) if kind.is_paired else float(2 * m - 4)
        if kind.is_paired:
            t_s, df_s, r, t_u, degen = impl.paired_rate(za + trend_a - (zb + trend_b))
        else:
            t_s, df_s, r, t_u, degen = impl.two_sample_rate(za + trend_a, zb + trend_b)
    return t_s, df_s, r, t_u, df_usual, degen


def _run_cell(kind: TestKind, m: int, rho: float, rho_pair: float, sigma: float,
              n: int, alpha: float, side: TailSide, delta_raw: float,
              rng: np.random.Generator) -> McCell:
    t_s, df_s, r, t_u, df_usual, degen = _simulate_tests(
        kind, m, rho, rho_pair, sigma, n, delta_raw, rng
    )
    valid = ~degen
    n_used = int(valid.sum())
    n_degen = n - n_used
    if n_used == 0:
        nan = float("nan")
        return McCell(kind, m, rho, rho_pair, n, n_degen, nan, nan, nan, nan, nan)
    p_s = p_value_array(t_s[valid], df_s[valid], side)
    p_u = p_value_array(t_u[valid], df_usual, side)
    rej_s = float(np.count_nonzero(p_s <= alpha)) / n_used
    rej_u = float(np.count_nonzero(p_u <= alpha)) / n_used
    return McCell(
        kind=kind, m=m, rho=rho, rho_pair=rho_pair, replicates=n,
        n_degenerate=n_degen,
        serial_reject=rej_s,
        usual_reject=rej_u,
        serial_se=math.sqrt(rej_s * (1.0 - rej_s) / n_used),
        usual_se=math.sqrt(rej_u * (1.0 - rej_u) / n_used),
        mean_r=float(np.mean(r[valid])),
    )


def run_monte_carlo(config: McConfig, max_workers: int | None = None) -> McSummary:
    """Run every grid cell; deterministic given the config (seed included).

    Cells are independent and may run on worker threads; assembly is keyed
    on the cell's grid position, so scheduling cannot change the output.
    """
    sigma = math.sqrt(config.sigma2)
    grid = [
        (m, rho, rp)
        for m in config.m_values
        for rho in config.rho_values
        for rp in config.rho_pair_values
    ]

    def one(cell) -> McCell:
        m, rho, rp = cell
        delta_raw = _delta_raw(config.kind, config.effect, sigma, rp)
        rng = _rng(config.seed, config.kind, m, rho, rp, _TAG_MAIN, 0)
        return _run_cell(
            config.kind, m, rho, rp, sigma, config.replicates,
            config.alpha, config.side, delta_raw, rng,
        )

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            cells = tuple(pool.map(one, grid))
    else:
        cells = tuple(one(cell) for cell in grid)
    return McSummary(config=config, cells=cells)


@dataclass(frozen=True)
class EmpiricalEffect:
    """Detectable effect found by simulation (delta in model-sigma units)."""

    delta: float
    probes: int
    power: float


def empirical_detectable_effect(
    kind: TestKind,
    m: int,
    rho: float,
    rho_pair: float | None = None,
    *,
    method: TestMethod = TestMethod.SERIAL,
    seed: int,
    replicates: int = 10_000,
    alpha: float = 0.05,
    side: TailSide = TailSide.UPPER,
    target_power: float = 0.80,
    sigma2: float = 1.0,
    power_tol: float = 0.005,
    delta_tol: float = 0.005,
    max_probes: int = 80,
) -> EmpiricalEffect:
    """Bisect the true effect until the chosen test's simulated power hits target.

    Every probe runs a fresh `replicates`-sized simulation on its own
    deterministic stream; bisection stops once simulated power is within
    `power_tol` of the target or the bracket narrows below `delta_tol`.
    """
    if rho_pair is None:
        rho_pair = 0.33 if kind.is_paired else 0.0
    sigma = math.sqrt(sigma2)
    sd_model = sigma * math.sqrt(2.0 * (1.0 - rho_pair)) if kind.is_paired else sigma
    tag = _TAG_SERIAL_PROBE if method is TestMethod.SERIAL else _TAG_USUAL_PROBE
    probe_count = 0

    def sim_power(delta: float) -> float:
        nonlocal probe_count
        rng = _rng(seed, kind, m, rho, rho_pair, tag, probe_count)
        probe_count += 1
        t_s, df_s, r, t_u, df_usual, degen = _simulate_tests(
            kind, m, rho, rho_pair, sigma, replicates, delta * sd_model, rng
        )
        valid = ~degen
        n_used = int(valid.sum())
        if n_used == 0:
            raise ConvergenceError("all replicates degenerate")
        if method is TestMethod.SERIAL:
            p = p_value_array(t_s[valid], df_s[valid], side)
        else:
            p = p_value_array(t_u[valid], df_usual, side)
        return float(np.count_nonzero(p <= alpha)) / n_used

    # The theoretical value sets the probe scale for both methods.
    query = PowerQuery(
        kind=kind, m=m, rho=rho, alpha=alpha, side=side, target_power=target_power
    )
    hi = detectable_effect(query)
    lo = 0.0
    power_hi = sim_power(hi)
    while power_hi < target_power:
        lo, hi = hi, 2.0 * hi
        if hi > 2.0 * 100.0 or probe_count >= max_probes:
            raise ConvergenceError(
                f"empirical detectable effect did not bracket for {kind.value}, m={m}"
            )
        power_hi = sim_power(hi)
    if abs(power_hi - target_power) <= power_tol:
        return EmpiricalEffect(delta=hi, probes=probe_count, power=power_hi)
    while probe_count < max_probes:
        if hi - lo <= delta_tol:
            return EmpiricalEffect(delta=0.5 * (lo + hi), probes=probe_count, power=power_hi)
        mid = 0.5 * (lo + hi)
        pw = sim_power(mid)
        if abs(pw - target_power) <= power_tol:
            return EmpiricalEffect(delta=mid, probes=probe_count, power=pw)
        if pw < target_power:
            lo = mid
        else:
            hi = mid
            power_hi = pw
    raise ConvergenceError(
        f"empirical detectable effect used more than {max_probes} probes"
    )


@dataclass(frozen=True)
class EffectRatios:
    """Empirical-to-theoretical detectable-effect ratios for one cell."""

    kind: TestKind
    m: int
    rho: float
    rho_pair: float
    target_power: float
    theoretical: float
    serial: EmpiricalEffect
    usual: EmpiricalEffect

    @property
    def serial_ratio(self) -> float:
        return self.serial.delta / self.theoretical

    @property
    def usual_ratio(self) -> float:
        return self.usual.delta / self.theoretical


def effect_ratio_cell(
    kind: TestKind,
    m: int,
    rho: float,
    rho_pair: float | None = None,
    *,
    seed: int,
    replicates: int = 10_000,
    alpha: float = 0.05,
    side: TailSide = TailSide.UPPER,
    target_power: float = 0.80,
) -> EffectRatios:
    """Theoretical delta plus serial and usual empirical deltas for one cell.

    The bisection's absolute bracket stop is rescaled to the cell's
    theoretical delta so large-m cells (tiny detectable effects) are not
    quantized by a fixed sigma-unit width.
    """
    if rho_pair is None:
        rho_pair = 0.33 if kind.is_paired else 0.0
    query = PowerQuery(
        kind=kind, m=m, rho=rho, alpha=alpha, side=side, target_power=target_power
    )
    theo = detectable_effect(query)
    common = dict(
        seed=seed, replicates=replicates, alpha=alpha, side=side,
        target_power=target_power, delta_tol=min(0.005, 0.01 * theo),
    )
    ser = empirical_detectable_effect(
        kind, m, rho, rho_pair, method=TestMethod.SERIAL, **common
    )
    usu = empirical_detectable_effect(
        kind, m, rho, rho_pair, method=TestMethod.USUAL, **common
    )
    return EffectRatios(
        kind=kind, m=m, rho=rho, rho_pair=rho_pair, target_power=target_power,
        theoretical=theo, serial=ser, usual=usu,
    )
