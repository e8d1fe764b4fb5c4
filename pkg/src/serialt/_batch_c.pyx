# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch test kernels for the Monte Carlo hot path.

Row-for-row semantics mirror serialt._batch_py (the import-time fallback
when this extension is unavailable); keep the two in sync.
"""

from libc.math cimport NAN, fabs, pow, sqrt

import numpy as np

cdef double RHO_BOUND = 0.99
cdef double DEGENERATE_REL = 1e-12


cdef inline double _clamp(double x) nogil:
    if x > RHO_BOUND:
        return RHO_BOUND
    if x < -RHO_BOUND:
        return -RHO_BOUND
    return x


cdef inline double _fuller(double rho_hat, double m) nogil:
    return _clamp(rho_hat + (1.0 - rho_hat * rho_hat) / (m - 1.0))


cdef inline double _c_level(double m, double r) nogil:
    cdef double om = r - 1.0
    return (m + 2.0 * pow(r, m + 1.0) - m * r * r - 2.0 * r) / (m * m * om * om)


cdef inline void _level_factors(double m, double r,
                                double* c, double* b, double* m_eff) nogil:
    c[0] = _c_level(m, r)
    b[0] = m * (1.0 - c[0]) / (m - 1.0)
    m_eff[0] = 1.0 / c[0]


cdef inline void _rate_factors(double m, double r,
                               double* c, double* b, double* m_eff) nogil:
    cdef double om = r - 1.0
    cdef double rm = pow(r, m)
    cdef double sxx = m * (m * m - 1.0) / 12.0
    cdef double bracket
    bracket = (-6.0 * r * (r + 1.0) * (r + 1.0) * (rm - 1.0) / (m * m * om * om * om * om)
               + 2.0 * r * (6.0 * r * rm + 6.0 * rm + r * r - 2.0 * r + 1.0)
               / (m * om * om * om)
               - 6.0 * r * (rm + 1.0) / (om * om)
               - 2.0 * m * r / om
               + (m * m - 1.0) / m)
    c[0] = 12.0 / ((m * m - 1.0) * (m * m - 1.0)) * bracket
    b[0] = (m - 1.0
            - 2.0 * r * (rm - m * r + m - 1.0) / (m * om * om)
            - m * (m * m - 1.0) * c[0] / 12.0) / (m - 2.0)
    m_eff[0] = 2.0 * m / (m * _c_level(m, r) + sxx * c[0])


cdef inline int _level_stats(const double[:, ::1] block, Py_ssize_t i, double m,
                             double* mean, double* ss, double* lag) nogil:
    # Returns 1 when the row is degenerate (no variability about the mean).
    cdef Py_ssize_t j, n_col = block.shape[1]
    cdef double acc = 0.0, scale = 0.0, prev, cur, thr
    for j in range(n_col):
        acc += block[i, j]
        if fabs(block[i, j]) > scale:
            scale = fabs(block[i, j])
    mean[0] = acc / m
    prev = block[i, 0] - mean[0]
    ss[0] = prev * prev
    lag[0] = 0.0
    for j in range(1, n_col):
        cur = block[i, j] - mean[0]
        ss[0] += cur * cur
        lag[0] += cur * prev
        prev = cur
    if scale < 1.0:
        scale = 1.0
    thr = DEGENERATE_REL * scale
    return 1 if ss[0] <= thr * thr * m else 0


cdef inline int _rate_stats(const double[:, ::1] block, Py_ssize_t i, double m,
                            double* beta, double* ss, double* lag) nogil:
    cdef Py_ssize_t j, n_col = block.shape[1]
    cdef double mean = 0.0, sxy = 0.0, scale = 0.0
    cdef double sxx = m * (m * m - 1.0) / 12.0
    cdef double half = (m + 1.0) / 2.0
    cdef double x, prev, cur, thr
    for j in range(n_col):
        mean += block[i, j]
        sxy += ((j + 1) - half) * block[i, j]
        if fabs(block[i, j]) > scale:
            scale = fabs(block[i, j])
    mean /= m
    beta[0] = sxy / sxx
    prev = block[i, 0] - mean - beta[0] * (1.0 - half)
    ss[0] = prev * prev
    lag[0] = 0.0
    for j in range(1, n_col):
        x = (j + 1) - half
        cur = block[i, j] - mean - beta[0] * x
        ss[0] += cur * cur
        lag[0] += cur * prev
        prev = cur
    if scale < 1.0:
        scale = 1.0
    thr = DEGENERATE_REL * scale
    return 1 if ss[0] <= thr * thr * m else 0


def paired_level(const double[:, ::1] d):
    cdef Py_ssize_t n = d.shape[0], i
    cdef double m = <double> d.shape[1]
    t_serial = np.empty(n)
    df_serial = np.empty(n)
    r_used = np.empty(n)
    t_usual = np.empty(n)
    degen = np.zeros(n, dtype=np.uint8)
    cdef double[::1] ts = t_serial, dfs = df_serial, rv = r_used, tu = t_usual
    cdef unsigned char[::1] dg = degen
    cdef double mean, ss, lag, r, c, b, m_eff, s2
    with nogil:
        for i in range(n):
            if _level_stats(d, i, m, &mean, &ss, &lag):
                ts[i] = NAN; dfs[i] = NAN; rv[i] = NAN; tu[i] = NAN; dg[i] = 1
                continue
            r = _fuller(lag / ss, m)
            _level_factors(m, r, &c, &b, &m_eff)
            s2 = ss / (m - 1.0)
            ts[i] = mean / sqrt(c * s2 / b)
            dfs[i] = m_eff - 1.0
            rv[i] = r
            tu[i] = mean / sqrt(s2 / m)
    return t_serial, df_serial, r_used, t_usual, degen.view(np.bool_)


def paired_rate(const double[:, ::1] d):
    cdef Py_ssize_t n = d.shape[0], i
    cdef double m = <double> d.shape[1]
    cdef double sxx = m * (m * m - 1.0) / 12.0
    t_serial = np.empty(n)
    df_serial = np.empty(n)
    r_used = np.empty(n)
    t_usual = np.empty(n)
    degen = np.zeros(n, dtype=np.uint8)
    cdef double[::1] ts = t_serial, dfs = df_serial, rv = r_used, tu = t_usual
    cdef unsigned char[::1] dg = degen
    cdef double beta, ss, lag, r, c, b, m_eff, s2
    with nogil:
        for i in range(n):
            if _rate_stats(d, i, m, &beta, &ss, &lag):
                ts[i] = NAN; dfs[i] = NAN; rv[i] = NAN; tu[i] = NAN; dg[i] = 1
                continue
            r = _fuller(lag / ss, m)
            _rate_factors(m, r, &c, &b, &m_eff)
            s2 = ss / (m - 2.0)
            ts[i] = beta / sqrt(c * s2 / b)
            dfs[i] = m_eff - 2.0
            rv[i] = r
            tu[i] = beta / sqrt(s2 / sxx)
    return t_serial, df_serial, r_used, t_usual, degen.view(np.bool_)


def two_sample_level(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], i
    cdef double ma = <double> a.shape[1], mb = <double> b.shape[1]
    t_serial = np.empty(n)
    df_serial = np.empty(n)
    r_used = np.empty(n)
    t_usual = np.empty(n)
    degen = np.zeros(n, dtype=np.uint8)
    cdef double[::1] ts = t_serial, dfs = df_serial, rv = r_used, tu = t_usual
    cdef unsigned char[::1] dg = degen
    cdef double mean_a, ss_a, lag_a, mean_b, ss_b, lag_b
    cdef double r_a, r_b, rbar, ca, ba, mea, cb, bb, meb, s2, effect
    cdef int bad
    with nogil:
        for i in range(n):
            bad = _level_stats(a, i, ma, &mean_a, &ss_a, &lag_a)
            bad |= _level_stats(b, i, mb, &mean_b, &ss_b, &lag_b)
            if bad:
                ts[i] = NAN; dfs[i] = NAN; rv[i] = NAN; tu[i] = NAN; dg[i] = 1
                continue
            r_a = _fuller(lag_a / ss_a, ma)
            r_b = _fuller(lag_b / ss_b, mb)
            rbar = _clamp((ma * r_a + mb * r_b) / (ma + mb))
            _level_factors(ma, rbar, &ca, &ba, &mea)
            _level_factors(mb, rbar, &cb, &bb, &meb)
            s2 = (ss_a + ss_b) / (ma + mb - 2.0)
            effect = mean_a - mean_b
            ts[i] = effect / sqrt((ca / ba + cb / bb) * s2)
            dfs[i] = mea + meb - 2.0
            rv[i] = rbar
            tu[i] = effect / sqrt(s2 * (1.0 / ma + 1.0 / mb))
    return t_serial, df_serial, r_used, t_usual, degen.view(np.bool_)


def two_sample_rate(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], i
    cdef double ma = <double> a.shape[1], mb = <double> b.shape[1]
    cdef double sxx_a = ma * (ma * ma - 1.0) / 12.0
    cdef double sxx_b = mb * (mb * mb - 1.0) / 12.0
    t_serial = np.empty(n)
    df_serial = np.empty(n)
    r_used = np.empty(n)
    t_usual = np.empty(n)
    degen = np.zeros(n, dtype=np.uint8)
    cdef double[::1] ts = t_serial, dfs = df_serial, rv = r_used, tu = t_usual
    cdef unsigned char[::1] dg = degen
    cdef double beta_a, ss_a, lag_a, beta_b, ss_b, lag_b
    cdef double r_a, r_b, rbar, ca, ba, mea, cb, bb, meb, s2, effect
    cdef int bad
    with nogil:
        for i in range(n):
            bad = _rate_stats(a, i, ma, &beta_a, &ss_a, &lag_a)
            bad |= _rate_stats(b, i, mb, &beta_b, &ss_b, &lag_b)
            if bad:
                ts[i] = NAN; dfs[i] = NAN; rv[i] = NAN; tu[i] = NAN; dg[i] = 1
                continue
            r_a = _fuller(lag_a / ss_a, ma)
            r_b = _fuller(lag_b / ss_b, mb)
            rbar = _clamp((ma * r_a + mb * r_b) / (ma + mb))
            _rate_factors(ma, rbar, &ca, &ba, &mea)
            _rate_factors(mb, rbar, &cb, &bb, &meb)
            s2 = (ss_a + ss_b) / (ma + mb - 4.0)
            effect = beta_a - beta_b
            ts[i] = effect / sqrt((ca / ba + cb / bb) * s2)
            dfs[i] = mea + meb - 4.0
            rv[i] = rbar
            tu[i] = effect / sqrt(s2 * (1.0 / sxx_a + 1.0 / sxx_b))
    return t_serial, df_serial, r_used, t_usual, degen.view(np.bool_)
