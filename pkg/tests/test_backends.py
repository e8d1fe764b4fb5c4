"""Batch kernels: numpy fallback vs compiled extension vs scalar API."""

import numpy as np
import pytest

from serialt import Series, TailSide, backend
from serialt import _batch_py as bpy
from serialt import ttests

try:
    from serialt import _batch_c as bc
except ImportError:
    bc = None

UP = TailSide.UPPER

needs_ext = pytest.mark.skipif(bc is None, reason="compiled extension not built")


def blocks(seed=0, n=800):
    rng = np.random.default_rng(seed)
    d = np.ascontiguousarray(rng.standard_normal((n, 8)) * 2 + 0.5)
    a = np.ascontiguousarray(rng.standard_normal((n, 6)) + 1)
    b = np.ascontiguousarray(rng.standard_normal((n, 9)) * 0.7)
    return d, a, b


def test_backend_selected():
    assert backend.BACKEND in ("c", "python")


@needs_ext
@pytest.mark.parametrize("fn", ["paired_level", "paired_rate"])
def test_paired_kernels_agree(fn):
    d, _, _ = blocks()
    py_out = getattr(bpy, fn)(d)
    c_out = getattr(bc, fn)(d)
    for i in range(4):
        np.testing.assert_allclose(py_out[i], c_out[i], rtol=1e-10, atol=1e-12)
    assert (py_out[4] == c_out[4]).all()


@needs_ext
@pytest.mark.parametrize("fn", ["two_sample_level", "two_sample_rate"])
def test_two_sample_kernels_agree(fn):
    _, a, b = blocks()
    py_out = getattr(bpy, fn)(a, b)
    c_out = getattr(bc, fn)(a, b)
    for i in range(4):
        np.testing.assert_allclose(py_out[i], c_out[i], rtol=1e-10, atol=1e-12)
    assert (py_out[4] == c_out[4]).all()


@pytest.mark.parametrize("mod", [bpy] + ([bc] if bc is not None else []))
def test_degenerate_rows_masked(mod):
    d, _, _ = blocks(n=10)
    d[3, :] = 4.25
    t_s, df_s, r, t_u, degen = mod.paired_level(d)
    assert degen[3] and not degen[0]
    assert np.isnan(t_s[3]) and np.isnan(t_u[3]) and np.isnan(r[3])
    assert np.isfinite(t_s[~degen]).all()


@pytest.mark.parametrize("mod", [bpy] + ([bc] if bc is not None else []))
def test_batch_matches_scalar_api(mod):
    d, a, b = blocks(seed=11, n=60)
    t_s, df_s, r, t_u, _ = mod.paired_level(d)
    for i in range(0, 60, 7):
        res = ttests.paired_serial_level(Series(d[i]), UP)
        assert res.statistic == pytest.approx(t_s[i], rel=1e-10)
        assert res.df == pytest.approx(df_s[i], rel=1e-10)
        assert res.rho_used == pytest.approx(r[i], abs=1e-12)
        usual = ttests.usual_paired_t(Series(d[i]), UP)
        assert usual.statistic == pytest.approx(t_u[i], rel=1e-10)

    t_s, df_s, r, t_u, _ = mod.paired_rate(d)
    for i in range(0, 60, 9):
        res = ttests.paired_serial_rate(Series(d[i]), UP)
        assert res.statistic == pytest.approx(t_s[i], rel=1e-10)
        assert res.df == pytest.approx(df_s[i], rel=1e-10)

    t_s, df_s, r, t_u, _ = mod.two_sample_level(a, b)
    for i in range(0, 60, 9):
        res = ttests.two_sample_serial_level(Series(a[i]), Series(b[i]), UP)
        assert res.statistic == pytest.approx(t_s[i], rel=1e-10)
        assert res.df == pytest.approx(df_s[i], rel=1e-10)
        usual = ttests.usual_two_sample_t(Series(a[i]), Series(b[i]), UP)
        assert usual.statistic == pytest.approx(t_u[i], rel=1e-10)

    t_s, df_s, r, t_u, _ = mod.two_sample_rate(a, b)
    for i in range(0, 60, 9):
        res = ttests.two_sample_serial_rate(Series(a[i]), Series(b[i]), UP)
        assert res.statistic == pytest.approx(t_s[i], rel=1e-10)
        assert res.df == pytest.approx(df_s[i], rel=1e-10)
        usual = ttests.usual_slope_diff_t(Series(a[i]), Series(b[i]), UP)
        assert usual.statistic == pytest.approx(t_u[i], rel=1e-10)


@needs_ext
def test_summaries_match_across_backends(monkeypatch):
    from serialt import mc
    from serialt.mc import McConfig, run_monte_carlo
    from serialt import TestKind

    cfg = McConfig(
        kind=TestKind.TWO_SAMPLE_RATE, seed=17, m_values=(5, 8),
        rho_values=(0.0, 0.33), replicates=1000,
    )

    class _Backend:
        def __init__(self, impl):
            self.impl = impl

    monkeypatch.setattr(mc, "backend", _Backend(bpy))
    s_py = run_monte_carlo(cfg)
    monkeypatch.setattr(mc, "backend", _Backend(bc))
    s_c = run_monte_carlo(cfg)
    for cp, cc_ in zip(s_py.cells, s_c.cells):
        # identical streams, math agreeing to ~1e-12: at most a replicate
        # or two on the alpha boundary may flip
        assert cp.serial_reject == pytest.approx(cc_.serial_reject, abs=0.003)
        assert cp.usual_reject == pytest.approx(cc_.usual_reject, abs=0.003)
        assert cp.mean_r == pytest.approx(cc_.mean_r, abs=1e-9)
        assert cp.n_degenerate == cc_.n_degenerate
