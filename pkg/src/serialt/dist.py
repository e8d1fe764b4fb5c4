"""Student-t with real-valued degrees of freedom, plus noncentral-t power.

Degrees of freedom are fractional throughout this package (the tests'
DF is an effective sample size minus the parameter count), so the CDF
is evaluated through the regularized incomplete beta function with real
parameters rather than any integer-df shortcut.  Noncentral-t tail
probabilities are computed by Gauss-Legendre quadrature over the
chi-square mixing distribution:

    P(T' <= x) = E_V[ Phi(x * sqrt(V/df) - lambda) ],   V ~ chi2(df),

integrated in log V with the flat stretches folded into incomplete-gamma
terms, so neither heavy skew at tiny df nor the astronomic critical
values it produces cause any loss of accuracy.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from scipy import special

from .errors import DomainError

#: Below this the beta-function parameters degenerate; error out instead.
MIN_DF = 0.01


class TailSide(Enum):
    LOWER = "lower"
    UPPER = "upper"
    TWO_SIDED = "two"


def _check_df(df: float) -> float:
    df = float(df)
    if not math.isfinite(df) or df < MIN_DF:
        raise DomainError(f"degrees of freedom must be >= {MIN_DF}, got {df}")
    return df


def _tail(t_abs: float, df: float) -> float:
    # P(T >= t_abs) for t_abs >= 0; always in [0, 0.5].
    if t_abs > 1e150:
        # t**2 would overflow; the tiny-df regime reaches such quantiles.
        return _tail_from_log(math.log(t_abs), df)
    z = df / (df + t_abs * t_abs)
    return 0.5 * float(special.betainc(0.5 * df, 0.5, z))


def t_cdf(t: float, df: float) -> float:
    """P(T_df <= t) for real df."""
    df = _check_df(df)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t}")
    q = _tail(abs(t), df)
    return q if t < 0 else 1.0 - q


def t_sf(t: float, df: float) -> float:
    """P(T_df >= t), computed directly so small upper tails keep precision."""
    df = _check_df(df)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t}")
    q = _tail(abs(t), df)
    return q if t > 0 else 1.0 - q


def _log_upper_quantile(tail2: float, df: float) -> float:
    """ln(t) for the positive t whose doubled upper-tail probability is tail2.

    Returns -inf at tail2 = 1 (the median) and stays finite-in-logs far
    past where t itself would overflow a double.
    """
    a = 0.5 * df
    z = float(special.betaincinv(a, 0.5, tail2))
    if z >= 1.0:
        return -math.inf
    if z < 1e-250:
        # The inverse incomplete beta saturates near the double floor
        # (tiny df pushes quantiles to astronomic scale); invert the
        # leading series term I_z(a, 1/2) ~ z**a / (a B(a, 1/2)) in logs,
        # where the dropped correction is O(z) and utterly negligible.
        log_beta = math.lgamma(a) + math.lgamma(0.5) - math.lgamma(a + 0.5)
        log_z = (math.log(tail2) + math.log(a) + log_beta) / a
        return 0.5 * (math.log(df) - log_z)
    return 0.5 * math.log(df * (1.0 - z) / z)


def _tail_from_log(lt: float, df: float) -> float:
    """P(T >= exp(lt)); the asymptotic branch mirrors _log_upper_quantile."""
    if lt <= 300.0:
        return _tail(math.exp(lt), df)
    a = 0.5 * df
    log_beta = math.lgamma(a) + math.lgamma(0.5) - math.lgamma(a + 0.5)
    log_z = math.log(df) - 2.0 * lt
    return 0.5 * math.exp(a * log_z - math.log(a) - log_beta)


def t_quantile(prob: float, df: float) -> float:
    """Inverse of t_cdf in its first argument; monotone in prob.

    Quantiles beyond the double range (only reachable for df within a
    hair of MIN_DF and prob near 1) return inf.
    """
    df = _check_df(df)
    prob = float(prob)
    if not 0.0 < prob < 1.0:
        raise DomainError(f"prob must be in (0, 1), got {prob}")
    if prob == 0.5:
        return 0.0
    if prob < 0.5:
        return -t_quantile(1.0 - prob, df)
    lt = _log_upper_quantile(2.0 * (1.0 - prob), df)
    if lt == -math.inf:
        return 0.0
    if lt > 709.0:
        return math.inf
    return math.exp(lt)


def p_value(t: float, df: float, side: TailSide) -> float:
    """Tail probability of the observed statistic for the given side."""
    if side is TailSide.UPPER:
        return t_sf(t, df)
    if side is TailSide.LOWER:
        return t_cdf(t, df)
    if side is TailSide.TWO_SIDED:
        return 2.0 * _tail(abs(float(t)), _check_df(df))
    raise DomainError(f"unknown side {side!r}")


def p_value_array(t: np.ndarray, df, side: TailSide) -> np.ndarray:
    """Vectorized p_value; df may be scalar or an array aligned with t."""
    t = np.asarray(t, dtype=float)
    df = np.asarray(df, dtype=float)
    z = df / (df + t * t)
    q = 0.5 * special.betainc(0.5 * df, 0.5, z)
    if side is TailSide.UPPER:
        return np.where(t >= 0, q, 1.0 - q)
    if side is TailSide.LOWER:
        return np.where(t <= 0, q, 1.0 - q)
    if side is TailSide.TWO_SIDED:
        return 2.0 * q
    raise DomainError(f"unknown side {side!r}")


# Gauss-Legendre panels reused for the noncentral-t mixing integral.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)

# Truncation thresholds: below ARG_EPS the normal argument has not moved
# off its V -> 0 limit; beyond ARG_SAT the normal CDF is saturated; MASS_EPS
# bounds the chi-square mass folded into the analytic end terms.
_ARG_EPS = 1e-9
_ARG_SAT = 8.2
_MASS_EPS = 1e-13
_LOG2 = math.log(2.0)


def _chi2_logcdf_point(w: float, a: float) -> float:
    """chi2(2a) CDF at V = exp(w), stable for w far below the double floor.

    For tiny V the regularized gamma reduces to its leading series term
    (V/2)**a / Gamma(a+1), evaluated in logs.
    """
    if w > -600.0:
        return float(special.gammainc(a, 0.5 * math.exp(w)))
    return math.exp(a * (w - _LOG2) - math.lgamma(a + 1.0))


def _chi2_log_quantile(a: float, q: float, upper: bool) -> float:
    """log V with P(V <= exp(w)) = q (or survival q), series fallback at underflow."""
    if upper:
        return math.log(2.0 * float(special.gammainccinv(a, q)))
    v = 2.0 * float(special.gammaincinv(a, q))
    if v > 0.0:
        return math.log(v)
    return _LOG2 + (math.log(q) + math.lgamma(a + 1.0)) / a


def _pos_tail_integral(log_x: float, df: float, nc: float, upper: bool) -> float:
    """E_V[Phi(+-(x*sqrt(V/df) - nc))] for x = exp(log_x), V ~ chi2(df).

    The normal argument is monotone in V, so the flat stretches at both
    ends fold into incomplete-gamma terms and only the transition region
    is integrated, in w = log V where neither V underflow nor the
    heavy-tailed chi-square shape is a problem.  `upper` selects
    Phi(nc - x*sqrt(V/df)), the survival orientation.  A second, denser
    panel ladder covers the sigmoid, which compresses like 1/nc in w.
    Taking x in logs keeps the huge central quantiles of near-floor df
    in range.
    """
    a = 0.5 * df
    lx = log_x - 0.5 * math.log(df)  # argument is exp(w/2 + lx) - nc

    def phi(arg):
        return special.ndtr(-arg if upper else arg)

    # w-window where the argument transitions, clipped to the mass window.
    w_lo = 2.0 * (math.log(_ARG_EPS) - lx)
    w_hi = 2.0 * (math.log(_ARG_SAT + nc) - lx) if _ARG_SAT + nc > 0.0 else w_lo
    w_lo = max(w_lo, _chi2_log_quantile(a, _MASS_EPS, upper=False))
    w_hi = min(max(w_hi, w_lo), _chi2_log_quantile(a, _MASS_EPS, upper=True))

    cdf_lo = _chi2_logcdf_point(w_lo, a)
    cdf_hi = _chi2_logcdf_point(w_hi, a)
    total = float(phi(-nc)) * cdf_lo
    total += float(phi(math.exp(0.5 * w_hi + lx) - nc)) * (1.0 - cdf_hi)
    if w_hi <= w_lo:
        return total

    edges = set(np.linspace(w_lo, w_hi, 17))
    if nc > 0.0:
        # Dense ladder across the sigmoid: argument in [-ARG_SAT, ARG_SAT].
        sig_hi = 2.0 * (math.log(nc + _ARG_SAT) - lx)
        sig_lo = 2.0 * (math.log(nc - _ARG_SAT) - lx) if nc > _ARG_SAT else w_lo
        sig_lo, sig_hi = max(sig_lo, w_lo), min(sig_hi, w_hi)
        if sig_hi > sig_lo:
            edges.update(np.linspace(sig_lo, sig_hi, 17))
    grid = np.array(sorted(edges))

    lo = grid[:-1, None]
    half = 0.5 * (grid[1:, None] - lo)
    w = lo + half * (_GL_X[None, :] + 1.0)
    arg = np.exp(0.5 * w + lx) - nc
    log_dens = a * w - 0.5 * np.exp(w) - math.lgamma(a) - a * _LOG2
    total += float(np.sum((phi(arg) * np.exp(log_dens) * half) @ _GL_W))
    return total


def _nct_cdf(x: float, df: float, nc: float) -> float:
    if x == 0.0:
        return float(special.ndtr(-nc))
    if x < 0.0:
        # P(T' <= x) = P(-T' >= -x) and -T' is noncentral t with -nc.
        return _pos_tail_integral(math.log(-x), df, -nc, upper=True)
    return _pos_tail_integral(math.log(x), df, nc, upper=False)


def _nct_sf(x: float, df: float, nc: float) -> float:
    if x == 0.0:
        return float(special.ndtr(nc))
    if x < 0.0:
        return _pos_tail_integral(math.log(-x), df, -nc, upper=False)
    return _pos_tail_integral(math.log(x), df, nc, upper=True)


def _exceed_prob(log_crit: float, df: float, lam: float) -> float:
    """P(T'(df, lam) > exp(log_crit)), log-domain critical value."""
    if log_crit == -math.inf:
        return float(special.ndtr(lam)) if lam else 0.5
    if lam == 0.0:
        # Central case: the incomplete-beta tail is exact and mirrors the
        # quantile's asymptotic branch, so power(0) lands on alpha.
        return _tail_from_log(log_crit, df)
    return _pos_tail_integral(log_crit, df, lam, upper=True)


def nct_power(df: float, lam: float, alpha: float, side: TailSide) -> float:
    """Probability that a noncentral-t variate lands in the alpha rejection region.

    Two-sided power uses both tails of the noncentral distribution, not a
    doubled single tail.
    """
    df = _check_df(df)
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError(f"noncentrality must be finite, got {lam}")
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if side is TailSide.UPPER:
        log_crit = _log_upper_quantile(2.0 * alpha, df)
        return min(1.0, max(0.0, _exceed_prob(log_crit, df, lam)))
    if side is TailSide.LOWER:
        # Reject when T' < -exp(log_crit); mirror to an exceedance of -T'.
        log_crit = _log_upper_quantile(2.0 * alpha, df)
        return min(1.0, max(0.0, _exceed_prob(log_crit, df, -lam)))
    if side is TailSide.TWO_SIDED:
        log_crit = _log_upper_quantile(alpha, df)
        both = _exceed_prob(log_crit, df, lam) + _exceed_prob(log_crit, df, -lam)
        return min(1.0, max(0.0, both))
    raise DomainError(f"unknown side {side!r}")
