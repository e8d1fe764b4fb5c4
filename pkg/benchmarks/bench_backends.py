"""Benchmark the compiled batch kernels against the numpy fallback.

Usage:
    python benchmarks/bench_backends.py [--replicates N] [--repeats K]

Times each of the four test kernels on a grid of series lengths, plus one
end-to-end Monte Carlo cell per backend, and prints the speedups.  Runs
with whatever backends are importable; a missing extension is reported,
not an error.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from serialt import _batch_py

try:
    from serialt import _batch_c
except ImportError:
    _batch_c = None


def time_call(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(replicates, repeats):
    rng = np.random.default_rng(0)
    rows = []
    for m in (6, 12, 50, 100):
        d = np.ascontiguousarray(rng.standard_normal((replicates, m)))
        a = np.ascontiguousarray(rng.standard_normal((replicates, m)))
        b = np.ascontiguousarray(rng.standard_normal((replicates, m)))
        for name, args in (
            ("paired_level", (d,)),
            ("paired_rate", (d,)),
            ("two_sample_level", (a, b)),
            ("two_sample_rate", (a, b)),
        ):
            t_py = time_call(getattr(_batch_py, name), *args, repeats=repeats)
            t_c = (
                time_call(getattr(_batch_c, name), *args, repeats=repeats)
                if _batch_c is not None
                else None
            )
            rows.append((name, m, t_py, t_c))
    return rows


def bench_cell(replicates, repeats):
    from serialt import mc
    from serialt.ar1 import TestKind

    def run(impl):
        class _B:
            pass

        shim = _B()
        shim.impl = impl
        saved = mc.backend
        mc.backend = shim
        try:
            cfg = mc.McConfig(
                kind=TestKind.PAIRED_LEVEL, seed=1, m_values=(8, 100),
                rho_values=(0.0, 0.67), rho_pair_values=(0.33,),
                replicates=replicates,
            )
            return time_call(mc.run_monte_carlo, cfg, repeats=repeats)
        finally:
            mc.backend = saved

    t_py = run(_batch_py)
    t_c = run(_batch_c) if _batch_c is not None else None
    return t_py, t_c


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _batch_c is None:
        print("compiled extension not available; timing numpy fallback only\n")

    print(f"kernel timings at {args.replicates} replicates (best of {args.repeats}):")
    header = f"{'kernel':<18}{'m':>5}{'numpy (ms)':>14}{'compiled (ms)':>16}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, m, t_py, t_c in bench_kernels(args.replicates, args.repeats):
        if t_c is None:
            print(f"{name:<18}{m:>5}{t_py * 1e3:>14.2f}{'-':>16}{'-':>10}")
        else:
            print(
                f"{name:<18}{m:>5}{t_py * 1e3:>14.2f}{t_c * 1e3:>16.2f}"
                f"{t_py / t_c:>9.1f}x"
            )

    t_py, t_c = bench_cell(args.replicates, args.repeats)
    print(f"\nend-to-end 4-cell Monte Carlo run at {args.replicates} replicates:")
    if t_c is None:
        print(f"  numpy fallback: {t_py * 1e3:.1f} ms")
    else:
        print(
            f"  numpy fallback: {t_py * 1e3:.1f} ms   "
            f"compiled: {t_c * 1e3:.1f} ms   speedup: {t_py / t_c:.1f}x"
        )


if __name__ == "__main__":
    main()
