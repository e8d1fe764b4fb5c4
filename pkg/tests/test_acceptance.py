"""Acceptance gate: one test per criterion, tolerances pinned.

Each test prints through the conftest summary hook as a PASS/FAIL line.
Monte Carlo criteria run at 10,000 replicates per cell with the fixed
master seed below; every stream is counter-derived, so results are
bit-stable across runs, thread counts, and cell order.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from serialt import (
    McConfig,
    Series,
    TailSide,
    TestKind,
    level_factors,
    nct_power,
    oracle_factors,
    rate_factors,
    run_monte_carlo,
    serial_test,
    t_cdf,
    t_quantile,
    usual_test,
)
from serialt.mc import empirical_detectable_effect
from serialt.power import PowerQuery, detectable_effect
from serialt.reproduce import table1_rows, table2_results
from serialt.ttests import TestMethod

SEED = 20250808

ALL_KINDS = (
    TestKind.PAIRED_LEVEL,
    TestKind.TWO_SAMPLE_LEVEL,
    TestKind.PAIRED_RATE,
    TestKind.TWO_SAMPLE_RATE,
)

# Reference values shipped with the bundled datasets (rounded as published).
TABLE1_EXPECTED = {
    #        mean   sd     r      serial_p
    9: (0.19, 0.35, 0.24, 0.25),
    18: (0.50, 0.83, -0.49, 0.02),
    23: (0.68, 0.59, 0.38, 0.17),
    17: (0.75, 0.57, 0.41, 0.15),
    15: (1.20, 0.55, -0.42, None),  # serial p published only as "< 0.01"
    12: (3.18, 1.70, -0.07, 0.01),
}
TABLE1_USUAL_P = {9: 0.18, 23: 0.05}

TABLE2_ESTIMATES = {
    ("level", "two-sample"): (34.9, 0.69),
    ("rate", "two-sample"): (12.4, 0.46),
    ("level", "difference"): (14.2, 0.50),
    ("rate", "difference"): (13.7, 0.32),
}
TABLE2_TESTS = {
    TestKind.TWO_SAMPLE_LEVEL: (0.27, 2.29, 0.808),
    TestKind.TWO_SAMPLE_RATE: (0.61, 3.98, 0.573),
    TestKind.PAIRED_LEVEL: (1.32, 2.22, 0.307),
    TestKind.PAIRED_RATE: (0.91, 2.94, 0.432),
}


@pytest.mark.acceptance(1, "bundled trial reproduction")
def test_c1_table1_reproduction():
    start = time.perf_counter()
    rows = {row.patient: row for row in table1_rows()}
    problems = []
    for patient, (mean, sd, r, serial_p) in TABLE1_EXPECTED.items():
        row = rows[patient]
        if abs(row.mean - mean) > 0.005:
            problems.append(f"patient {patient} mean {row.mean:.4f} != {mean}")
        if abs(row.sd - sd) > 0.005:
            problems.append(f"patient {patient} sd {row.sd:.4f} != {sd}")
        if abs(row.fuller_r - r) > 0.01:
            problems.append(f"patient {patient} r {row.fuller_r:.4f} != {r}")
        if serial_p is None:
            if not row.serial_p < 0.01:
                problems.append(f"patient {patient} serial p {row.serial_p:.4f} not < 0.01")
        elif abs(row.serial_p - serial_p) > 0.015:
            problems.append(f"patient {patient} serial p {row.serial_p:.4f} != {serial_p}")
    for patient, usual_p in TABLE1_USUAL_P.items():
        if abs(rows[patient].usual_p - usual_p) > 0.01:
            problems.append(f"patient {patient} usual p {rows[patient].usual_p:.4f} != {usual_p}")
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 1 exceeded 1 s: {elapsed:.2f}s"
    assert not problems, "; ".join(problems)


@pytest.mark.acceptance(2, "bundled bi-phasic reproduction")
def test_c2_table2_reproduction():
    start = time.perf_counter()
    results = table2_results()
    problems = []
    for est in results.estimates:
        s_ref, r_ref = TABLE2_ESTIMATES[(est.model, est.series)]
        if abs(est.s - s_ref) > 0.05:
            problems.append(f"{est.model}/{est.series} s {est.s:.4f} != {s_ref}")
        if abs(est.r - r_ref) > 0.01:
            problems.append(f"{est.model}/{est.series} r {est.r:.4f} != {r_ref}")
    for res in results.tests:
        t_ref, df_ref, p_ref = TABLE2_TESTS[res.kind]
        if abs(abs(res.statistic) - t_ref) > 0.05:
            problems.append(f"{res.kind.value} |t| {abs(res.statistic):.4f} != {t_ref}")
        if abs(res.df - df_ref) > 0.1:
            # Known irreconcilable for two-sample-rate: the published 3.98
            # is inconsistent with the published pooled r = 0.46 under the
            # published factor algebra (oracle-validated recomputation
            # gives 4.1054).  See the decisions ledger for the analysis.
            problems.append(f"{res.kind.value} df {res.df:.4f} != {df_ref}")
        if abs(res.p_value - p_ref) > 0.03:
            problems.append(f"{res.kind.value} p {res.p_value:.4f} != {p_ref}")
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 2 exceeded 1 s: {elapsed:.2f}s"
    assert not problems, "; ".join(problems)


@pytest.mark.acceptance(3, "closed forms equal the matrix oracle")
def test_c3_oracle_equivalence():
    start = time.perf_counter()
    rhos = [(-99 + 11 * k) / 100.0 for k in range(19)]  # -0.99 .. 0.99 step 0.11
    worst = 0.0
    for rho in rhos:
        for m in range(2, 31):
            f = level_factors(m, rho)
            o = oracle_factors(TestKind.PAIRED_LEVEL, m, rho, exact=True)
            worst = max(worst, abs(f.c - o.c), abs(f.b - o.b), abs(f.m_eff - o.m_eff))
        for m in range(3, 31):
            f = rate_factors(m, rho)
            o = oracle_factors(TestKind.PAIRED_RATE, m, rho, exact=True)
            worst = max(worst, abs(f.c - o.c), abs(f.b - o.b), abs(f.m_eff - o.m_eff))
    elapsed = time.perf_counter() - start
    assert worst < 1e-9, f"worst |closed - oracle| = {worst:.3e}"
    assert elapsed < 10.0, f"criterion 3 exceeded 10 s: {elapsed:.2f}s"


@pytest.mark.acceptance(4, "zero-correlation reduction to the usual tests")
def test_c4_reduction_property():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    for kind in ALL_KINDS:
        for _ in range(100):
            if kind.is_paired:
                m = int(rng.integers(5, 13))
                args = (Series(rng.standard_normal(m) * 3 + 1),)
            else:
                m_a = int(rng.integers(4, 11))
                m_b = int(rng.integers(5, 11))
                args = (
                    Series(rng.standard_normal(m_a) * 2 + 0.3),
                    Series(rng.standard_normal(m_b) * 2),
                )
            forced = serial_test(kind, *args, side=TailSide.UPPER, rho_override=0.0)
            usual = usual_test(kind, *args, side=TailSide.UPPER)
            assert abs(forced.statistic - usual.statistic) < 1e-9
            assert abs(forced.df - usual.df) < 1e-9
            assert abs(forced.p_value - usual.p_value) < 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 4 exceeded 1 s: {elapsed:.2f}s"


def _pool(cells):
    n = sum(c.replicates - c.n_degenerate for c in cells)
    serial = sum(c.serial_reject * (c.replicates - c.n_degenerate) for c in cells) / n
    usual = sum(c.usual_reject * (c.replicates - c.n_degenerate) for c in cells) / n
    return serial, usual, n


@pytest.mark.acceptance(5, "Monte Carlo Type I error")
def test_c5_type1_error():
    start = time.perf_counter()
    type1_grids = {
        kind: run_monte_carlo(McConfig(kind=kind, seed=SEED), max_workers=4)
        for kind in ALL_KINDS
    }
    problems = []

    # (a) usual tests are exact at rho = 0: 0.05 +/- 0.01 in every cell.
    for kind, summary in type1_grids.items():
        for cell in summary.cells:
            if cell.rho == 0.0 and abs(cell.usual_reject - 0.05) > 0.01:
                problems.append(
                    f"(a) {kind.value} m={cell.m} usual {cell.usual_reject:.4f}"
                )

    # (b) serial level tests at rho = 0 stay within 0.01 plus the
    # protocol's Monte Carlo error budget (95% worst-case half-width).
    for kind in (TestKind.PAIRED_LEVEL, TestKind.TWO_SAMPLE_LEVEL):
        summary = type1_grids[kind]
        for m in summary.config.m_values:
            cells = [c for c in summary.cells if c.m == m and c.rho == 0.0]
            serial, _, n = _pool(cells)
            budget = 1.96 * math.sqrt(0.25 / n)
            if abs(serial - 0.05) > 0.01 + budget:
                problems.append(f"(b) {kind.value} m={m} serial {serial:.4f}")

    # (c) serial level tests are near nominal at m = 100 under positive
    # correlation, and beat the usual tests there.
    for kind in (TestKind.PAIRED_LEVEL, TestKind.TWO_SAMPLE_LEVEL):
        summary = type1_grids[kind]
        for rho in (0.33, 0.67):
            cells = [c for c in summary.cells if c.m == 100 and c.rho == rho]
            serial, usual, _ = _pool(cells)
            if abs(serial - 0.05) > 0.015:
                problems.append(f"(c) {kind.value} rho={rho} serial {serial:.4f}")
            if abs(usual - 0.05) <= abs(serial - 0.05):
                problems.append(
                    f"(c) {kind.value} rho={rho} usual {usual:.4f} beat serial {serial:.4f}"
                )

    # (d) serial rate tests approach nominal by m = 30 at rho = 0.
    for kind in (TestKind.PAIRED_RATE, TestKind.TWO_SAMPLE_RATE):
        cells = [c for c in type1_grids[kind].cells if c.m == 30 and c.rho == 0.0]
        serial, _, _ = _pool(cells)
        if abs(serial - 0.05) > 0.015:
            problems.append(f"(d) {kind.value} serial {serial:.4f}")

    elapsed = time.perf_counter() - start
    assert elapsed < 300.0, f"criterion 5 exceeded 5 min: {elapsed:.1f}s"
    assert not problems, "; ".join(problems)


@pytest.mark.acceptance(6, "empirical-to-theoretical effect-size ratios")
def test_c6_effect_size_ratios():
    start = time.perf_counter()
    problems = []

    def ratio(kind, m, rho, method):
        rho_pair = 0.33 if kind.is_paired else 0.0
        theo = detectable_effect(PowerQuery(kind=kind, m=m, rho=rho))
        emp = empirical_detectable_effect(
            kind, m, rho, rho_pair, method=method, seed=SEED,
            replicates=10_000, delta_tol=5e-4,
        )
        return emp.delta / theo

    # Usual tests are exactly calibrated without correlation: ratio 1 +/- 0.03.
    for kind in ALL_KINDS:
        r = ratio(kind, 8, 0.0, TestMethod.USUAL)
        if abs(r - 1.0) > 0.03:
            problems.append(f"usual ratio {kind.value} rho=0: {r:.4f}")

    # Serial ratios approach 1 by m = 100 at every nonzero default rho.
    for kind in ALL_KINDS:
        for rho in (-0.33, 0.33, 0.67):
            r = ratio(kind, 100, rho, TestMethod.SERIAL)
            if abs(r - 1.0) > 0.05:
                problems.append(f"serial ratio {kind.value} m=100 rho={rho}: {r:.4f}")

    # At m = 6 the serial level tests are already more realistic than the
    # usual ones under any nonzero correlation.
    for kind in (TestKind.PAIRED_LEVEL, TestKind.TWO_SAMPLE_LEVEL):
        for rho in (-0.33, 0.33, 0.67):
            rs = ratio(kind, 6, rho, TestMethod.SERIAL)
            ru = ratio(kind, 6, rho, TestMethod.USUAL)
            if not abs(rs - 1.0) < abs(ru - 1.0):
                problems.append(
                    f"{kind.value} m=6 rho={rho}: serial {rs:.3f} vs usual {ru:.3f}"
                )

    elapsed = time.perf_counter() - start
    assert elapsed < 900.0, f"criterion 6 exceeded 15 min: {elapsed:.1f}s"
    assert not problems, "; ".join(problems)


@pytest.mark.acceptance(7, "distribution correctness")
def test_c7_distribution_correctness():
    start = time.perf_counter()
    # Cauchy closed form and symmetry, exact at double rounding (<= 1 ulp).
    assert t_cdf(1.0, 1.0) == pytest.approx(0.75, abs=2.3e-16)
    assert t_cdf(0.0, 3.7) == 0.5
    for t in (0.4, 1.7, 6.0):
        for df in (0.5, 1.0, 7.3, 240.0):
            assert abs(t_cdf(-t, df) - (1.0 - t_cdf(t, df))) <= 2.3e-16
    assert t_cdf(1.959964, 10000.0) == pytest.approx(0.975, abs=1e-4)

    for alpha in (0.01, 0.05, 0.25):
        for side in TailSide:
            assert nct_power(9.0, 0.0, alpha, side) == pytest.approx(alpha, abs=1e-6)

    # Five spot configurations against a one-million-replicate simulation.
    spots = [
        (9.0, 2.6, 0.05, TailSide.UPPER),
        (2.29, 1.5, 0.05, TailSide.UPPER),
        (0.878, 4.0, 0.05, TailSide.UPPER),
        (35.5, 2.0, 0.05, TailSide.TWO_SIDED),
        (5.0, -1.2, 0.05, TailSide.LOWER),
    ]
    rng = np.random.default_rng(SEED)
    n = 1_000_000
    for df, lam, alpha, side in spots:
        tprime = (rng.standard_normal(n) + lam) / np.sqrt(rng.chisquare(df, n) / df)
        if side is TailSide.UPPER:
            sim = float(np.mean(tprime > t_quantile(1 - alpha, df)))
        elif side is TailSide.LOWER:
            sim = float(np.mean(tprime < t_quantile(alpha, df)))
        else:
            crit = t_quantile(1 - alpha / 2, df)
            sim = float(np.mean(np.abs(tprime) > crit))
        se = math.sqrt(sim * (1 - sim) / n)
        power = nct_power(df, lam, alpha, side)
        assert power == pytest.approx(sim, abs=3 * se), (df, lam, side)

    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 7 exceeded 1 s: {elapsed:.2f}s"


@pytest.mark.acceptance(8, "byte-identical deterministic outputs")
def test_c8_determinism(tmp_path):
    config = {
        "kind": "paired-rate",
        "seed": 424242,
        "m_values": [5, 8, 30],
        "rho_values": [0.0, 0.33],
        "rho_pair_values": [0.33],
        "replicates": 400,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))

    def run(args):
        proc = subprocess.run(
            [sys.executable, "-m", "serialt.cli", *args],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        return proc

    blobs = []
    for name, threads in (("s1", "1"), ("s2", "1"), ("s3", "6")):
        out = tmp_path / name
        run(["simulate", "--config", str(cfg_path), "--out", str(out),
             "--threads", threads])
        blobs.append(
            (out / "mc_summary.csv").read_bytes() + (out / "mc_summary.json").read_bytes()
        )
    assert blobs[0] == blobs[1] == blobs[2], "simulate output not byte-identical"

    fig_blobs = []
    for name, threads in (("f1", "1"), ("f2", "1"), ("f3", "6")):
        out = tmp_path / name
        run(["reproduce", "figure_data", "--seed", "7", "--replicates", "120",
             "--out", str(out), "--threads", threads])
        fig_blobs.append(
            (out / "figure_type1.csv").read_bytes()
            + (out / "figure_effect_ratio.csv").read_bytes()
            + (out / "figure_manifest.json").read_bytes()
        )
    assert fig_blobs[0] == fig_blobs[1] == fig_blobs[2], (
        "figure_data output not byte-identical"
    )
