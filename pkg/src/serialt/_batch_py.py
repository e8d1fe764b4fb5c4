"""Vectorized batch test kernels: the pure-Python fallback backend.

Each function runs one test per row of its input block(s) and returns
``(t_serial, df_serial, r_used, t_usual, degenerate)`` arrays.  Rows
flagged degenerate (no residual variability) carry NaN statistics.

Semantics must match ``serialt._batch_c`` row for row; keep the two in
sync.  Only elementwise numpy and axis reductions are used, so results
are deterministic regardless of thread count or BLAS configuration.
"""

from __future__ import annotations

import numpy as np

RHO_BOUND = 0.99
_DEGENERATE_REL = 1e-12


def _fuller(rho_hat: np.ndarray, m: int) -> np.ndarray:
    r = rho_hat + (1.0 - rho_hat * rho_hat) / (m - 1.0)
    return np.clip(r, -RHO_BOUND, RHO_BOUND)


def _c_level(m: float, r: np.ndarray) -> np.ndarray:
    om = r - 1.0
    return (m + 2.0 * r ** (m + 1) - m * r * r - 2.0 * r) / (m * m * om * om)


def _level_factors(m: float, r: np.ndarray):
    c = _c_level(m, r)
    b = m * (1.0 - c) / (m - 1.0)
    return c, b, 1.0 / c


def _rate_factors(m: float, r: np.ndarray):
    om = r - 1.0
    rm = r**m
    bracket = (
        -6.0 * r * (r + 1.0) ** 2 * (rm - 1.0) / (m * m * om**4)
        + 2.0 * r * (6.0 * r * rm + 6.0 * rm + r * r - 2.0 * r + 1.0) / (m * om**3)
        - 6.0 * r * (rm + 1.0) / (om * om)
        - 2.0 * m * r / om
        + (m * m - 1.0) / m
    )
    c = 12.0 / (m * m - 1.0) ** 2 * bracket
    b = (
        m - 1.0
        - 2.0 * r * (rm - m * r + m - 1.0) / (m * om * om)
        - m * (m * m - 1.0) * c / 12.0
    ) / (m - 2.0)
    sxx = m * (m * m - 1.0) / 12.0
    m_eff = 2.0 * m / (m * _c_level(m, r) + sxx * c)
    return c, b, m_eff


def _level_stats(block: np.ndarray):
    m = block.shape[1]
    mean = block.mean(axis=1)
    e = block - mean[:, None]
    ss = (e * e).sum(axis=1)
    lag = (e[:, 1:] * e[:, :-1]).sum(axis=1)
    scale = np.maximum(1.0, np.abs(block).max(axis=1))
    degen = ss <= (_DEGENERATE_REL * scale) ** 2 * m
    return mean, ss, lag, degen


def _rate_stats(block: np.ndarray):
    m = block.shape[1]
    x = np.arange(1, m + 1, dtype=float) - (m + 1) / 2.0
    sxx = m * (m * m - 1.0) / 12.0
    mean = block.mean(axis=1)
    beta = (block * x).sum(axis=1) / sxx
    e = block - mean[:, None] - beta[:, None] * x[None, :]
    ss = (e * e).sum(axis=1)
    lag = (e[:, 1:] * e[:, :-1]).sum(axis=1)
    scale = np.maximum(1.0, np.abs(block).max(axis=1))
    degen = ss <= (_DEGENERATE_REL * scale) ** 2 * m
    return beta, ss, lag, degen, sxx


def _mask_nan(degen: np.ndarray, *arrays: np.ndarray) -> None:
    for arr in arrays:
        arr[degen] = np.nan


def paired_level(d: np.ndarray):
    d = np.ascontiguousarray(d, dtype=float)
    n, m = d.shape
    mean, ss, lag, degen = _level_stats(d)
    ss = np.where(degen, 1.0, ss)
    r = _fuller(lag / ss, m)
    c, b, m_eff = _level_factors(float(m), r)
    s2 = ss / (m - 1.0)
    t_serial = mean / np.sqrt(c * s2 / b)
    df_serial = m_eff - 1.0
    t_usual = mean / np.sqrt(s2 / m)
    _mask_nan(degen, t_serial, df_serial, r, t_usual)
    return t_serial, df_serial, r, t_usual, degen


def paired_rate(d: np.ndarray):
    d = np.ascontiguousarray(d, dtype=float)
    n, m = d.shape
    beta, ss, lag, degen, sxx = _rate_stats(d)
    ss = np.where(degen, 1.0, ss)
    r = _fuller(lag / ss, m)
    c, b, m_eff = _rate_factors(float(m), r)
    s2 = ss / (m - 2.0)
    t_serial = beta / np.sqrt(c * s2 / b)
    df_serial = m_eff - 2.0
    t_usual = beta / np.sqrt(s2 / sxx)
    _mask_nan(degen, t_serial, df_serial, r, t_usual)
    return t_serial, df_serial, r, t_usual, degen


def two_sample_level(a: np.ndarray, b: np.ndarray):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    ma, mb = a.shape[1], b.shape[1]
    mean_a, ss_a, lag_a, degen_a = _level_stats(a)
    mean_b, ss_b, lag_b, degen_b = _level_stats(b)
    degen = degen_a | degen_b
    ss_a = np.where(degen_a, 1.0, ss_a)
    ss_b = np.where(degen_b, 1.0, ss_b)
    r_a = _fuller(lag_a / ss_a, ma)
    r_b = _fuller(lag_b / ss_b, mb)
    rbar = np.clip((ma * r_a + mb * r_b) / (ma + mb), -RHO_BOUND, RHO_BOUND)
    ca, ba, ma_eff = _level_factors(float(ma), rbar)
    cb, bb, mb_eff = _level_factors(float(mb), rbar)
    s2 = (ss_a + ss_b) / (ma + mb - 2.0)
    effect = mean_a - mean_b
    t_serial = effect / np.sqrt((ca / ba + cb / bb) * s2)
    df_serial = ma_eff + mb_eff - 2.0
    t_usual = effect / np.sqrt(s2 * (1.0 / ma + 1.0 / mb))
    _mask_nan(degen, t_serial, df_serial, rbar, t_usual)
    return t_serial, df_serial, rbar, t_usual, degen


def two_sample_rate(a: np.ndarray, b: np.ndarray):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    ma, mb = a.shape[1], b.shape[1]
    beta_a, ss_a, lag_a, degen_a, sxx_a = _rate_stats(a)
    beta_b, ss_b, lag_b, degen_b, sxx_b = _rate_stats(b)
    degen = degen_a | degen_b
    ss_a = np.where(degen_a, 1.0, ss_a)
    ss_b = np.where(degen_b, 1.0, ss_b)
    r_a = _fuller(lag_a / ss_a, ma)
    r_b = _fuller(lag_b / ss_b, mb)
    rbar = np.clip((ma * r_a + mb * r_b) / (ma + mb), -RHO_BOUND, RHO_BOUND)
    ca, ba, ma_eff = _rate_factors(float(ma), rbar)
    cb, bb, mb_eff = _rate_factors(float(mb), rbar)
    s2 = (ss_a + ss_b) / (ma + mb - 4.0)
    effect = beta_a - beta_b
    t_serial = effect / np.sqrt((ca / ba + cb / bb) * s2)
    df_serial = ma_eff + mb_eff - 4.0
    t_usual = effect / np.sqrt(s2 * (1.0 / sxx_a + 1.0 / sxx_b))
    _mask_nan(degen, t_serial, df_serial, rbar, t_usual)
    return t_serial, df_serial, rbar, t_usual, degen
