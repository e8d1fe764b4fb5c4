"""Correction-factor closed forms against brute-force and matrix oracles."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from serialt import (
    DomainError,
    TestKind,
    level_factors,
    min_equal_m,
    oracle_factors,
    rate_factors,
    validate_sizes,
)
from serialt.errors import MinimumSizeError


def brute_c_level(m, rho):
    # Var of the mean under AR(1): (1'R1) / m**2 by direct double sum.
    total = sum(rho ** abs(j - k) for j in range(m) for k in range(m))
    return total / m**2


def brute_c_rate(m, rho):
    # Var of the slope: a'Ra with a = x / sum(x^2), x the centered index.
    x = np.arange(1, m + 1) - (m + 1) / 2.0
    a = x / np.sum(x * x)
    return float(sum(a[j] * a[k] * rho ** abs(j - k) for j in range(m) for k in range(m)))


def brute_b(m, rho, p):
    # {m - tr(P_X R)} / (m - p) with the projection written out.
    x = np.arange(1, m + 1) - (m + 1) / 2.0
    if p == 1:
        x_mat = np.ones((m, 1))
    else:
        x_mat = np.column_stack([np.ones(m), x])
    r_mat = rho ** np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
    proj = x_mat @ np.linalg.inv(x_mat.T @ x_mat) @ x_mat.T
    return (m - np.trace(proj @ r_mat)) / (m - p)


class TestLevelFactors:
    def test_independent_observations(self):
        f = level_factors(6, 0.0)
        assert f.c == 1.0 / 6.0
        assert f.b == 1.0
        assert f.m_eff == 6.0

    def test_m6_rho_half_against_brute_force(self):
        f = level_factors(6, 0.5)
        assert f.c == pytest.approx(brute_c_level(6, 0.5), abs=1e-12)
        assert f.c == pytest.approx(0.390625, abs=1e-12)
        assert f.b == pytest.approx(0.73125, abs=1e-12)
        assert f.m_eff == pytest.approx(2.56, abs=1e-12)

    def test_long_series_approaches_asymptote(self):
        # m(1 - rho)/(1 + rho) for rho = 0.5 and m = 1000.
        f = level_factors(1000, 0.5)
        assert f.m_eff == pytest.approx(1000 / 3, abs=0.5)
        o = oracle_factors(TestKind.PAIRED_LEVEL, 1000, 0.5)
        assert f.m_eff == pytest.approx(o.m_eff, abs=1e-6)

    def test_m_eff_strictly_decreasing_in_positive_rho(self):
        for m in (4, 8, 20):
            grid = np.linspace(0.0, 0.99, 50)
            vals = [level_factors(m, r).m_eff for r in grid]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            level_factors(6, 0.995)
        with pytest.raises(DomainError):
            level_factors(6, -1.2)
        with pytest.raises(DomainError):
            level_factors(1, 0.3)
        with pytest.raises(DomainError):
            level_factors(6, float("nan"))


class TestRateFactors:
    def test_independent_observations(self):
        f = rate_factors(8, 0.0)
        assert f.c == pytest.approx(12.0 / (8 * 63), abs=1e-15)
        assert f.b == 1.0
        assert f.m_eff == 8.0

    def test_variance_factor_matches_quadratic_form(self):
        f = rate_factors(8, 0.5)
        assert f.c == pytest.approx(brute_c_rate(8, 0.5), abs=1e-10)

    def test_bias_factor_matches_trace_formula(self):
        f = rate_factors(5, -0.33)
        assert f.b == pytest.approx(brute_b(5, -0.33, p=2), abs=1e-10)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            rate_factors(2, 0.1)
        with pytest.raises(DomainError):
            rate_factors(8, 0.991)


class TestOracle:
    def test_matches_level_closed_form(self):
        f = level_factors(6, 0.5)
        o = oracle_factors(TestKind.PAIRED_LEVEL, 6, 0.5, exact=True)
        for attr in ("c", "b", "m_eff"):
            assert getattr(f, attr) == pytest.approx(getattr(o, attr), abs=1e-10)

    def test_matches_rate_closed_form(self):
        f = rate_factors(12, 0.67)
        o = oracle_factors(TestKind.PAIRED_RATE, 12, 0.67, exact=True)
        for attr in ("c", "b", "m_eff"):
            assert getattr(f, attr) == pytest.approx(getattr(o, attr), abs=1e-10)

    @pytest.mark.parametrize("m", [2, 3, 7, 19])
    def test_zero_correlation_is_classical(self, m):
        o = oracle_factors(TestKind.TWO_SAMPLE_LEVEL, m, 0.0, exact=True)
        assert o.c == pytest.approx(1.0 / m, abs=1e-15)
        assert o.b == pytest.approx(1.0, abs=1e-15)

    def test_float_path_consistent_with_exact(self):
        for kind in (TestKind.PAIRED_LEVEL, TestKind.PAIRED_RATE):
            exact = oracle_factors(kind, 40, -0.8, exact=True)
            dense = oracle_factors(kind, 40, -0.8, exact=False)
            assert dense.c == pytest.approx(exact.c, abs=1e-12)
            assert dense.b == pytest.approx(exact.b, abs=1e-12)
            assert dense.m_eff == pytest.approx(exact.m_eff, rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            oracle_factors(TestKind.PAIRED_LEVEL, 6, 1.0)
        with pytest.raises(DomainError):
            oracle_factors(TestKind.PAIRED_LEVEL, 2001, 0.5)

    def test_grid_subset_equivalence(self):
        # The acceptance suite runs the full grid; keep a quick slice here.
        for rho in (-0.99, -0.55, 0.0, 0.44, 0.99):
            for m in range(2, 13):
                f = level_factors(m, rho)
                o = oracle_factors(TestKind.PAIRED_LEVEL, m, rho, exact=True)
                assert abs(f.c - o.c) < 1e-9
                assert abs(f.b - o.b) < 1e-9
                assert abs(f.m_eff - o.m_eff) < 1e-9
                if m >= 3:
                    f = rate_factors(m, rho)
                    o = oracle_factors(TestKind.PAIRED_RATE, m, rho, exact=True)
                    assert abs(f.c - o.c) < 1e-9
                    assert abs(f.b - o.b) < 1e-9
                    assert abs(f.m_eff - o.m_eff) < 1e-9


class TestNumericalBehavior:
    def test_continuity_through_zero_correlation(self):
        for m in range(2, 31):
            base = level_factors(m, 0.0)
            for rho in (1e-8, -1e-8):
                f = level_factors(m, rho)
                assert abs(f.b - base.b) < 1e-6
                assert abs(f.m_eff - base.m_eff) < 1e-6
            if m >= 3:
                base = rate_factors(m, 0.0)
                for rho in (1e-8, -1e-8):
                    f = rate_factors(m, rho)
                    assert abs(f.b - base.b) < 1e-6
                    assert abs(f.m_eff - base.m_eff) < 1e-6

    @given(
        m=st.integers(min_value=3, max_value=60),
        rho=st.floats(min_value=-0.99, max_value=0.99),
        level=st.booleans(),
    )
    def test_factors_positive_and_identity(self, m, rho, level):
        f = level_factors(m, rho) if level else rate_factors(m, rho)
        p = 1 if level else 2
        assert f.c > 0 and f.b > 0 and f.m_eff > 0
        # effective-sample-size identity linking b and m_eff
        assert f.b == pytest.approx(
            m * (f.m_eff - p) / (f.m_eff * (m - p)), abs=1e-10
        )

    @given(
        s2=st.floats(min_value=1e-6, max_value=1e6),
        m=st.integers(min_value=4, max_value=40),
        rho=st.floats(min_value=-0.95, max_value=0.95),
    )
    def test_unbiased_variance_rearrangements_agree(self, s2, m, rho):
        # s2/b equals m_eff (m - p) s2 / (m (m_eff - p)) algebraically.
        f = level_factors(m, rho)
        lhs = s2 / f.b
        rhs = f.m_eff * (m - 1) * s2 / (m * (f.m_eff - 1))
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestKindRules:
    def test_minimum_sizes(self):
        validate_sizes(TestKind.PAIRED_LEVEL, 4)
        validate_sizes(TestKind.PAIRED_RATE, 5)
        validate_sizes(TestKind.TWO_SAMPLE_LEVEL, 3, 4)
        validate_sizes(TestKind.TWO_SAMPLE_RATE, 4, 5)
        with pytest.raises(MinimumSizeError):
            validate_sizes(TestKind.PAIRED_LEVEL, 3)
        with pytest.raises(MinimumSizeError):
            validate_sizes(TestKind.PAIRED_RATE, 4)
        with pytest.raises(MinimumSizeError):
            validate_sizes(TestKind.TWO_SAMPLE_LEVEL, 3, 3)
        with pytest.raises(MinimumSizeError):
            validate_sizes(TestKind.TWO_SAMPLE_RATE, 4, 4)
        with pytest.raises(DomainError):
            validate_sizes(TestKind.PAIRED_LEVEL, 6, 6)
        with pytest.raises(DomainError):
            validate_sizes(TestKind.TWO_SAMPLE_LEVEL, 6)

    def test_equal_group_minimums(self):
        assert min_equal_m(TestKind.PAIRED_LEVEL) == 4
        assert min_equal_m(TestKind.TWO_SAMPLE_LEVEL) == 4
        assert min_equal_m(TestKind.PAIRED_RATE) == 5
        assert min_equal_m(TestKind.TWO_SAMPLE_RATE) == 5

    def test_kind_properties(self):
        assert TestKind.PAIRED_LEVEL.location_params == 1
        assert TestKind.TWO_SAMPLE_RATE.location_params == 2
        assert TestKind.PAIRED_RATE.is_paired
        assert not TestKind.TWO_SAMPLE_LEVEL.is_paired
