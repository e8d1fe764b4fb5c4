"""Theoretical power and detectable effect sizes for the serial tests.

The assumed correlation is treated as known: it is plugged into the
variance/bias factors and the degrees of freedom, and the sampling noise
of the correlation estimate is deliberately ignored.  That is what makes
simulated-to-theoretical effect-size ratios informative at small m.

Effect sizes delta are expressed in units of the analyzed model's sigma
(the difference-series sigma for paired kinds, the per-series sigma for
2-sample kinds); for rate kinds delta is the true slope per index step in
those units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ar1 import TestKind, factors_for_kind, validate_sizes
from .dist import TailSide, nct_power
from .errors import ConvergenceError, DomainError

#: Root finding brackets delta in [0, DELTA_CAP] sigma units.
DELTA_CAP = 100.0

_POWER_TOL = 1e-6
_MAX_BISECT = 200


@dataclass(frozen=True)
class PowerQuery:
    """A power-analysis configuration for one test kind."""

    kind: TestKind
    m: int
    m_b: int | None = None
    rho: float = 0.0
    alpha: float = 0.05
    side: TailSide = TailSide.UPPER
    target_power: float = 0.80
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 0.5:
            raise DomainError(f"alpha must be in (0, 0.5], got {self.alpha}")
        if not 0.0 < self.target_power < 1.0:
            raise DomainError(f"target power must be in (0, 1), got {self.target_power}")
        if self.sigma <= 0.0 or not math.isfinite(self.sigma):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.kind.is_paired:
            validate_sizes(self.kind, self.m)
        else:
            validate_sizes(self.kind, self.m, self.m_b if self.m_b is not None else self.m)

    @property
    def sizes(self) -> tuple[int, ...]:
        if self.kind.is_paired:
            return (self.m,)
        return (self.m, self.m_b if self.m_b is not None else self.m)


def _se_scale_and_df(q: PowerQuery) -> tuple[float, float]:
    """Scale such that SE = scale * sigma when s2 sits at its expectation, plus DF."""
    p = q.kind.location_params
    factors = [factors_for_kind(q.kind, m, q.rho) for m in q.sizes]
    df = sum(f.m_eff for f in factors) - p * len(factors)
    if len(factors) == 1:
        f = factors[0]
        # c * E(s2)/b = c * sigma**2: the bias factors cancel.
        return math.sqrt(f.c), df
    fa, fb = factors
    ma, mb = q.sizes
    bbar = ((ma - p) * fa.b + (mb - p) * fb.b) / (ma + mb - 2 * p)
    return math.sqrt((fa.c / fa.b + fb.c / fb.b) * bbar), df


def theoretical_power(q: PowerQuery, delta: float) -> float:
    """Power of the serial test at true effect delta (in sigma units)."""
    delta = float(delta)
    if not math.isfinite(delta):
        raise DomainError(f"delta must be finite, got {delta}")
    scale, df = _se_scale_and_df(q)
    lam = delta / scale
    if q.side is TailSide.LOWER:
        lam = -lam
    return nct_power(df, lam, q.alpha, q.side)


def detectable_effect(q: PowerQuery) -> float:
    """Smallest delta > 0 whose theoretical power reaches the query's target.

    Bracketed bisection in [0, 100] sigma; power is monotone in delta so
    bisection is robust even at the extreme fractional df this produces.
    """
    target = q.target_power
    if target <= q.alpha:
        raise DomainError(
            f"target power {target} must exceed alpha {q.alpha} for a positive effect"
        )
    lo = 0.0
    hi = 1.0
    while theoretical_power(q, hi) < target:
        lo = hi
        hi *= 2.0
        if hi > DELTA_CAP:
            raise ConvergenceError(
                f"no delta in (0, {DELTA_CAP}] sigma reaches power {target} for {q}"
            )
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        pw = theoretical_power(q, mid)
        if abs(pw - target) <= _POWER_TOL:
            return mid
        if pw < target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"detectable-effect bisection failed to converge for {q}")
