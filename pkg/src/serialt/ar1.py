"""Closed-form AR(1) correction factors and a matrix oracle for them.

For a length-m series whose errors follow a first-order autoregressive
process (correlation matrix R with entry ``rho**|j-k|``), ordinary least
squares keeps its unbiased point estimates but both the sampling variance
of the estimate and the expectation of the residual variance pick up
rho-dependent factors:

    Var(estimate) = c(rho) * sigma**2
    E(s**2)       = b(rho) * sigma**2

The effective sample size m' ties the two together through

    b(rho) = m * (m' - p) / (m' * (m - p)),

where p counts the location parameters (1 for a level fit, 2 for a rate
fit).  ``level_factors`` and ``rate_factors`` evaluate the closed forms;
``oracle_factors`` rebuilds the same quantities from the dense matrix
definitions and exists to cross-validate the closed forms.  For small m
the oracle runs in exact rational arithmetic, so discrepancies measure
the closed forms' rounding alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DomainError, MinimumSizeError

#: Factor evaluation clamps |rho| here: the closed forms have (rho - 1)
#: powers in denominators and DF -> 0 as rho -> 1.
RHO_BOUND = 0.99

#: Largest series length the dense-matrix oracle will build.
ORACLE_MAX_M = 2000

_EXACT_ORACLE_MAX_M = 64


class TestKind(Enum):
    """The four test variants: paired/2-sample crossed with level/rate."""

    PAIRED_LEVEL = "paired-level"
    TWO_SAMPLE_LEVEL = "two-sample-level"
    PAIRED_RATE = "paired-rate"
    TWO_SAMPLE_RATE = "two-sample-rate"

    @property
    def is_paired(self) -> bool:
        return self in (TestKind.PAIRED_LEVEL, TestKind.PAIRED_RATE)

    @property
    def is_level(self) -> bool:
        return self in (TestKind.PAIRED_LEVEL, TestKind.TWO_SAMPLE_LEVEL)

    @property
    def location_params(self) -> int:
        """Location parameters fitted per series (1 = mean, 2 = mean + slope)."""
        return 1 if self.is_level else 2


def validate_sizes(kind: TestKind, m: int, m_b: int | None = None) -> None:
    """Enforce the per-kind minimum series lengths.

    Paired kinds analyze a single difference series; 2-sample kinds take
    two series and also carry a combined-length requirement.
    """
    if kind.is_paired:
        if m_b is not None:
            raise DomainError(f"{kind.value} analyzes a single difference series")
        need = 4 if kind.is_level else 5
        if m < need:
            raise MinimumSizeError(f"{kind.value} requires m >= {need}, got m={m}")
    else:
        if m_b is None:
            raise DomainError(f"{kind.value} requires two series lengths")
        if kind.is_level:
            if m < 3 or m_b < 3 or m + m_b < 7:
                raise MinimumSizeError(
                    f"{kind.value} requires m_a, m_b >= 3 and m_a + m_b >= 7, "
                    f"got m_a={m}, m_b={m_b}"
                )
        else:
            if m < 4 or m_b < 4 or m + m_b < 9:
                raise MinimumSizeError(
                    f"{kind.value} requires m_a, m_b >= 4 and m_a + m_b >= 9, "
                    f"got m_a={m}, m_b={m_b}"
                )


def min_equal_m(kind: TestKind) -> int:
    """Smallest per-series length valid for `kind` with equal group sizes."""
    if kind is TestKind.PAIRED_LEVEL or kind is TestKind.TWO_SAMPLE_LEVEL:
        return 4
    return 5


@dataclass(frozen=True)
class CorrectionFactors:
    """Variance factor c, bias factor b and effective sample size for one series."""

    c: float
    b: float
    m_eff: float
    m: int
    rho: float


def _check_args(m: int, rho: float, min_m: int) -> tuple[int, float]:
    m = int(m)
    rho = float(rho)
    if m < min_m:
        raise DomainError(f"series length must be >= {min_m}, got {m}")
    if not abs(rho) <= RHO_BOUND:
        raise DomainError(f"|rho| must be <= {RHO_BOUND}, got {rho}")
    return m, rho


def _c_level(m: float, rho: float) -> float:
    if rho == 0.0:
        return 1.0 / m
    om = rho - 1.0
    return (m + 2.0 * rho ** (m + 1) - m * rho * rho - 2.0 * rho) / (m * m * om * om)


def _c_rate(m: float, rho: float) -> float:
    if rho == 0.0:
        return 12.0 / (m * (m * m - 1.0))
    om = rho - 1.0
    rm = rho**m
    bracket = (
        -6.0 * rho * (rho + 1.0) ** 2 * (rm - 1.0) / (m * m * om**4)
        + 2.0 * rho * (6.0 * rho * rm + 6.0 * rm + rho * rho - 2.0 * rho + 1.0)
        / (m * om**3)
        - 6.0 * rho * (rm + 1.0) / (om * om)
        - 2.0 * m * rho / om
        + (m * m - 1.0) / m
    )
    return 12.0 / (m * m - 1.0) ** 2 * bracket


def level_factors(m: int, rho: float) -> CorrectionFactors:
    """Correction factors for a level (constant-mean) fit.

    At rho = 0 this returns c = 1/m, b = 1 and m_eff = m exactly.
    m_eff is evaluated as 1/c, which is algebraically identical to the
    b-based form but stays stable where m*c is tiny.
    """
    m, rho = _check_args(m, rho, 2)
    if rho == 0.0:
        return CorrectionFactors(c=1.0 / m, b=1.0, m_eff=float(m), m=m, rho=0.0)
    c = _c_level(m, rho)
    b = m * (1.0 - c) / (m - 1.0)
    return CorrectionFactors(c=c, b=b, m_eff=1.0 / c, m=m, rho=rho)


def rate_factors(m: int, rho: float) -> CorrectionFactors:
    """Correction factors for a rate (linear-trend) fit on a centered index.

    m_eff is evaluated as 2m / (m*c_level + Sxx*c_rate); the denominator
    equals m - (m-2)*b without the catastrophic cancellation the printed
    form suffers near the rho clamp.  At m = 3 the general bracket loses
    eight digits near the clamp, so the factors use their exact
    simplifications c = (1 - rho^2)/2 and (rho^3 - 3 rho + 2) =
    (rho - 1)^2 (rho + 2).
    """
    m, rho = _check_args(m, rho, 3)
    sxx = m * (m * m - 1.0) / 12.0
    if rho == 0.0:
        return CorrectionFactors(c=1.0 / sxx, b=1.0, m_eff=float(m), m=m, rho=0.0)
    if m == 3:
        c = (1.0 - rho * rho) / 2.0
        b = 2.0 - 2.0 * rho * (rho + 2.0) / 3.0 - (1.0 - rho * rho)
    else:
        c = _c_rate(m, rho)
        b = (
            m
            - 1.0
            - 2.0 * rho * (rho**m - m * rho + m - 1.0) / (m * (rho - 1.0) ** 2)
            - m * (m * m - 1.0) * c / 12.0
        ) / (m - 2.0)
    m_eff = 2.0 * m / (m * _c_level(m, rho) + sxx * c)
    return CorrectionFactors(c=c, b=b, m_eff=m_eff, m=m, rho=rho)


def factors_for_kind(kind: TestKind, m: int, rho: float) -> CorrectionFactors:
    """Level or rate factors according to the kind's model."""
    return level_factors(m, rho) if kind.is_level else rate_factors(m, rho)


def oracle_factors(
    kind: TestKind, m: int, rho: float, *, exact: bool | None = None
) -> CorrectionFactors:
    """Recompute (c, b, m_eff) from the dense matrix definitions.

    c comes from the relevant diagonal entry of (X'X)^-1 X'RX (X'X)^-1,
    b from {m - tr(P_X R)} / {m - rank(P_X)}, and m_eff by inverting the
    effective-sample-size identity.  With ``exact`` (default for m <= 64)
    everything is evaluated in rational arithmetic: any float rho is an
    exact binary rational, so the result is correct to the final float
    rounding and serves as an independent oracle for the closed forms.
    """
    m = int(m)
    rho = float(rho)
    level = kind.is_level
    if m < (2 if level else 3):
        raise DomainError(f"oracle needs m >= {2 if level else 3}, got {m}")
    if m > ORACLE_MAX_M:
        raise DomainError(f"oracle limited to m <= {ORACLE_MAX_M}, got {m}")
    if not abs(rho) < 1.0:
        raise DomainError(f"R is singular-class for |rho| >= 1, got {rho}")
    if exact is None:
        exact = m <= _EXACT_ORACLE_MAX_M
    if exact:
        c, b, m_eff = _oracle_exact(level, m, Fraction(rho))
    else:
        c, b, m_eff = _oracle_float(level, m, rho)
    return CorrectionFactors(c=c, b=b, m_eff=m_eff, m=m, rho=rho)


def _oracle_exact(level: bool, m: int, rho: Fraction) -> tuple[float, float, float]:
    # Every quadratic form in R reduces to a lag-weighted sum of rho**d,
    # so only m distinct powers are needed.  Putting them over the common
    # denominator den**(m-1) keeps all sums in integer arithmetic.
    num, den = rho.numerator, rho.denominator
    scaled = [num**d * den ** (m - 1 - d) for d in range(m)]
    big_den = den ** (m - 1)

    w_one = [m] + [2 * (m - d) for d in range(1, m)]
    one_r_one = Fraction(sum(w * s for w, s in zip(w_one, scaled)), big_den)

    if level:
        c = one_r_one / m**2
        tr = one_r_one / m
        p = 1
    else:
        u = [2 * j - (m + 1) for j in range(1, m + 1)]  # 2 * centered index
        w_uu = [sum(ui * ui for ui in u)] + [
            2 * sum(u[j] * u[j + d] for j in range(m - d)) for d in range(1, m)
        ]
        u_r_u = Fraction(sum(w * s for w, s in zip(w_uu, scaled)), big_den)
        w_1u = [sum(u)] + [
            sum(u[j] + u[j + d] for j in range(m - d)) for d in range(1, m)
        ]
        one_r_u = Fraction(sum(w * s for w, s in zip(w_1u, scaled)), big_den)

        # X = [1 x] with x = u/2; G = X'X, M = X'RX, V = Ginv M Ginv.
        g11 = Fraction(m)
        g12 = Fraction(sum(u), 2)
        g22 = Fraction(sum(ui * ui for ui in u), 4)
        det = g11 * g22 - g12 * g12
        m11 = one_r_one
        m12 = one_r_u / 2
        m22 = u_r_u / 4
        c = (g12 * g12 * m11 - 2 * g11 * g12 * m12 + g11 * g11 * m22) / (det * det)
        tr = (g22 * m11 - 2 * g12 * m12 + g11 * m22) / det
        p = 2

    b = (m - tr) / (m - p)
    m_eff = Fraction(m * p) / (m - b * (m - p))
    return float(c), float(b), float(m_eff)


def _oracle_float(level: bool, m: int, rho: float) -> tuple[float, float, float]:
    idx = np.arange(1, m + 1, dtype=float)
    r_mat = rho ** np.abs(np.subtract.outer(idx, idx))
    if level:
        x_mat = np.ones((m, 1))
        p = 1
    else:
        x_mat = np.column_stack([np.ones(m), idx - (m + 1) / 2.0])
        p = 2
    g_inv = np.linalg.inv(x_mat.T @ x_mat)
    m_mat = x_mat.T @ r_mat @ x_mat
    v_mat = g_inv @ m_mat @ g_inv
    c = float(v_mat[-1, -1])
    tr = float(np.trace(g_inv @ m_mat))
    b = (m - tr) / (m - p)
    m_eff = m * p / (m - b * (m - p))
    return c, float(b), float(m_eff)
