"""Command-line surface: analyze, power, simulate, reproduce, datasets.

Exit codes: 0 success, 2 usage/validation problems, 3 degenerate data,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, datasets, io, reproduce
from .ar1 import TestKind
from .dist import TailSide
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    MinimumSizeError,
    SerialTError,
    ValidationError,
)
from .estimate import fit_level, fit_rate, serial_corr
from .mc import McConfig, run_monte_carlo
from .power import PowerQuery, detectable_effect, theoretical_power
from .ttests import serial_test, usual_test

_SIDES = {"lower": TailSide.LOWER, "upper": TailSide.UPPER, "two": TailSide.TWO_SIDED}
_KINDS = {kind.value: kind for kind in TestKind}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_NO_CONVERGENCE = 4


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_input(args):
    if getattr(args, "dataset", None):
        return datasets.load(args.dataset), f"dataset:{args.dataset}"
    if getattr(args, "data", None):
        if args.data == "-":
            return io.parse_series_text(sys.stdin.read(), origin="<stdin>"), "<stdin>"
        return io.ingest_series(args.data), str(args.data)
    raise ValidationError("provide --data FILE or --dataset NAME")


def _estimation_block(series, kind: TestKind) -> dict:
    fit = fit_level(series) if kind.is_level else fit_rate(series)
    est = serial_corr(fit)
    block = {
        "label": series.label,
        "m": series.m,
        "mu_hat": fit.mu_hat,
        "beta_hat": fit.beta_hat,
        "s": fit.s2 ** 0.5,
        "rho_hat": est.rho_hat,
        "r": est.r,
        "clamped": est.clamped,
    }
    return block


def _cmd_analyze(args) -> int:
    kind = _KINDS[args.kind]
    side = _SIDES[args.side]
    if not 0.0 < args.alpha <= 0.5:
        raise ValidationError(f"alpha must be in (0, 0.5], got {args.alpha}")
    loaded, origin = _load_input(args)
    paired_input = isinstance(loaded, tuple)
    if kind.is_paired and paired_input:
        raise ValidationError(
            f"{kind.value} analyzes a single difference series; "
            "got a two-column input (form A-B first)"
        )
    if not kind.is_paired and not paired_input:
        raise ValidationError(f"{kind.value} needs a two-column input (index,a,b)")

    if paired_input:
        first, second = loaded
    else:
        first, second = loaded, None

    if args.rho_override is not None and args.rho_override == 0.0:
        result = usual_test(kind, first, second, side)
    elif args.rho_override is not None:
        result = serial_test(kind, first, second, side, rho_override=args.rho_override)
    else:
        result = serial_test(kind, first, second, side)

    estimation = [_estimation_block(s, kind) for s in ((first,) if second is None else (first, second))]
    report = {
        "request": {
            "command": "analyze",
            "kind": kind.value,
            "side": side.value,
            "alpha": args.alpha,
            "input": origin,
            "correlation_override": args.rho_override,
        },
        "result": io.result_to_dict(result),
        "estimation": estimation,
        "warnings": [f"flag:{name}" for name in result.flags.names()],
    }
    _emit_report(args, report, "analyze", [io.result_to_row(result, args.alpha)],
                 io.RESULT_CSV_COLUMNS)
    _print_human(
        f"{kind.value} [{result.method.value}] t = {result.statistic:.4g}, "
        f"df = {result.df:.4g}, p({side.value}) = {result.p_value:.4g}, "
        f"effect = {result.effect:.4g}, r = {result.rho_used:.4g}"
        + (f"  flags: {','.join(result.flags.names())}" if result.flags.names() else "")
    )
    return EXIT_OK


def _cmd_power(args) -> int:
    kind = _KINDS[args.kind]
    query = PowerQuery(
        kind=kind,
        m=args.m,
        m_b=args.m_b,
        rho=args.rho,
        alpha=args.alpha,
        side=_SIDES[args.side],
        target_power=args.target_power,
        sigma=args.sigma,
    )
    if args.delta is not None:
        power = theoretical_power(query, args.delta)
        payload = {"mode": "power", "delta": args.delta, "power": power}
        human = f"power at delta={args.delta:.4g}: {power:.4g}"
    else:
        delta = detectable_effect(query)
        payload = {
            "mode": "detectable-effect",
            "target_power": args.target_power,
            "delta": delta,
        }
        human = f"detectable delta for power {args.target_power:.4g}: {delta:.4g} sigma"
    report = {
        "request": {
            "command": "power",
            "kind": kind.value,
            "m": args.m,
            "m_b": args.m_b,
            "rho": args.rho,
            "alpha": args.alpha,
            "side": args.side,
            "sigma": args.sigma,
        },
        "power": payload,
        "warnings": [],
    }
    columns = ("kind", "m", "m_b", "rho", "alpha", "side", "mode", "delta", "power_or_target")
    row = [
        kind.value, args.m, args.m_b if args.m_b is not None else "",
        float(args.rho), float(args.alpha), args.side, payload["mode"],
        float(payload["delta"]),
        float(payload.get("power", payload.get("target_power"))),
    ]
    _emit_report(args, report, "power", [row], columns)
    _print_human(human)
    return EXIT_OK


_CONFIG_KEYS = {
    "kind", "seed", "m_values", "rho_values", "rho_pair_values",
    "sigma2", "replicates", "alpha", "side", "effect",
}


def load_simulate_config(path: str | Path) -> McConfig:
    """Parse and validate a simulate config file (JSON, one key per field)."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {p}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{p}: config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"{p}: unknown config keys: {', '.join(sorted(unknown))}")
    if "kind" not in raw:
        raise ValidationError(f"{p}: config requires 'kind'")
    if "seed" not in raw:
        raise ValidationError(f"{p}: config requires an explicit 'seed'")
    kind = _KINDS.get(raw["kind"])
    if kind is None:
        raise ValidationError(f"{p}: unknown kind {raw['kind']!r}")
    side = raw.get("side", "upper")
    if side not in _SIDES:
        raise ValidationError(f"{p}: unknown side {side!r}")
    try:
        return McConfig(
            kind=kind,
            seed=int(raw["seed"]),
            m_values=tuple(raw["m_values"]) if "m_values" in raw else None,
            rho_values=tuple(raw.get("rho_values", (-0.33, 0.0, 0.33, 0.67))),
            rho_pair_values=(
                tuple(raw["rho_pair_values"]) if "rho_pair_values" in raw else None
            ),
            sigma2=float(raw.get("sigma2", 1.0)),
            replicates=int(raw.get("replicates", 10_000)),
            alpha=float(raw.get("alpha", 0.05)),
            side=_SIDES[side],
            effect=raw.get("effect"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SerialTError):
            raise
        raise ValidationError(f"{p}: bad config value: {exc}") from None


def _cmd_simulate(args) -> int:
    config = load_simulate_config(args.config)
    summary = run_monte_carlo(config, max_workers=args.threads)
    out = _out_dir(args)
    csv_path = out / "mc_summary.csv"
    json_path = out / "mc_summary.json"
    io.write_csv(csv_path, io.MC_CSV_COLUMNS, io.mc_summary_rows(summary))
    json_path.write_bytes(io.dump_json(io.mc_summary_to_dict(summary)).encode("utf-8"))
    _print_human(f"wrote {csv_path} and {json_path} ({len(summary.cells)} cells)")
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    out = _out_dir(args)
    if args.target == "table1":
        rows = reproduce.table1_rows()
        io.write_csv(
            out / "table1.csv",
            ("patient", "m", "mean", "sd", "fuller_r", "usual_p", "serial_p"),
            [
                [r.patient, r.m, r.mean, r.sd, r.fuller_r, r.usual_p, r.serial_p]
                for r in rows
            ],
        )
        for r in rows:
            _print_human(
                f"patient {r.patient}: mean {r.mean:.4g}, sd {r.sd:.4g}, "
                f"r {r.fuller_r:.4g}, usual p {r.usual_p:.4g}, serial p {r.serial_p:.4g}"
            )
        _print_human(f"wrote {out / 'table1.csv'}")
        return EXIT_OK
    if args.target == "table2":
        results = reproduce.table2_results()
        io.write_csv(
            out / "table2_estimates.csv",
            ("model", "series", "s", "r"),
            [[e.model, e.series, e.s, e.r] for e in results.estimates],
        )
        io.write_csv(
            out / "table2_tests.csv",
            io.RESULT_CSV_COLUMNS,
            [io.result_to_row(res, 0.05) for res in results.tests],
        )
        for e in results.estimates:
            _print_human(f"{e.model:>5} {e.series:<11} s = {e.s:.4g}, r = {e.r:.4g}")
        for res in results.tests:
            _print_human(
                f"{res.kind.value}: t = {res.statistic:.4g}, df = {res.df:.4g}, "
                f"p = {res.p_value:.4g}"
            )
        _print_human(f"wrote {out / 'table2_estimates.csv'} and {out / 'table2_tests.csv'}")
        return EXIT_OK

    # figure_data
    type1_rows: list[list] = []
    ratio_rows: list[list] = []
    for kind in reproduce.ALL_KINDS:
        summary = reproduce.figure_type1(
            kind, seed=args.seed, replicates=args.replicates, max_workers=args.threads
        )
        type1_rows.extend(io.mc_summary_rows(summary))
        for row in reproduce.figure_ratios(
            kind, seed=args.seed, replicates=args.replicates, max_workers=args.threads
        ):
            ratio_rows.append(
                [
                    row.kind.value, row.m, float(row.rho), float(row.rho_pair),
                    "" if row.theoretical is None else float(row.theoretical),
                    "" if row.serial_delta is None else float(row.serial_delta),
                    "" if row.usual_delta is None else float(row.usual_delta),
                    "" if row.serial_ratio is None else float(row.serial_ratio),
                    "" if row.usual_ratio is None else float(row.usual_ratio),
                    int(row.converged),
                ]
            )
    io.write_csv(out / "figure_type1.csv", io.MC_CSV_COLUMNS, type1_rows)
    io.write_csv(
        out / "figure_effect_ratio.csv",
        ("kind", "m", "rho", "rho_pair", "theoretical_delta", "serial_delta",
         "usual_delta", "serial_ratio", "usual_ratio", "converged"),
        ratio_rows,
    )
    manifest = {"seed": args.seed, "replicates": args.replicates}
    (out / "figure_manifest.json").write_bytes(io.dump_json(manifest).encode("utf-8"))
    _print_human(
        f"wrote {out / 'figure_type1.csv'}, {out / 'figure_effect_ratio.csv'} "
        f"(seed={args.seed}, replicates={args.replicates})"
    )
    return EXIT_OK


def _cmd_datasets(args) -> int:
    for info in datasets.list_datasets():
        kind = "paired columns" if info.paired else "single series"
        _print_human(f"{info.name:<18} {kind:<14} {info.description}")
    return EXIT_OK


def _emit_report(args, report: dict, stem: str, rows, columns) -> None:
    fmt = getattr(args, "format", "json")
    if args.out:
        out = _out_dir(args)
        if fmt == "json":
            (out / f"{stem}.json").write_bytes(io.dump_json(report).encode("utf-8"))
        else:
            io.write_csv(out / f"{stem}.csv", columns, rows)
    elif fmt == "json":
        sys.stdout.write(io.dump_json(report))
    else:
        import csv as _csv

        writer = _csv.writer(sys.stdout)
        writer.writerow(list(columns))
        for row in rows:
            writer.writerow([io.fmt_float(v) if isinstance(v, float) else v for v in row])


def _print_human(line: str) -> None:
    print(line, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="serialt",
        description="Serial-correlation-corrected t-tests for N-of-1 trials",
    )
    parser.add_argument("--version", action="version", version=f"serialt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run one test on a dataset")
    analyze.add_argument("kind", choices=sorted(_KINDS))
    analyze.add_argument("--data", "-d", help="input CSV path, or - for stdin")
    analyze.add_argument("--dataset", help="bundled dataset name (see `datasets list`)")
    analyze.add_argument("--side", choices=sorted(_SIDES), default="two")
    analyze.add_argument("--alpha", type=float, default=0.05)
    analyze.add_argument("--rho-override", type=float, default=None,
                         help="force this serial correlation instead of estimating "
                              "(0 reproduces the usual test)")
    analyze.add_argument("--format", choices=("json", "csv"), default="json")
    analyze.add_argument("--out", help="write the report into this directory")
    analyze.set_defaults(func=_cmd_analyze)

    power = sub.add_parser("power", help="theoretical power / detectable effect")
    power.add_argument("--kind", choices=sorted(_KINDS), required=True)
    power.add_argument("--m", type=int, required=True)
    power.add_argument("--m-b", type=int, default=None, dest="m_b")
    power.add_argument("--rho", type=float, default=0.0)
    power.add_argument("--alpha", type=float, default=0.05)
    power.add_argument("--side", choices=sorted(_SIDES), default="upper")
    power.add_argument("--sigma", type=float, default=1.0)
    power.add_argument("--delta", type=float, default=None,
                       help="effect size in sigma units; omit to solve for it")
    power.add_argument("--target-power", type=float, default=0.80, dest="target_power")
    power.add_argument("--format", choices=("json", "csv"), default="json")
    power.add_argument("--out")
    power.set_defaults(func=_cmd_power)

    simulate = sub.add_parser("simulate", help="Monte Carlo run from a config file")
    simulate.add_argument("--config", required=True, help="JSON config (see README)")
    simulate.add_argument("--out", default=None)
    simulate.add_argument("--threads", type=int, default=1)
    simulate.set_defaults(func=_cmd_simulate)

    rep = sub.add_parser("reproduce", help="recompute published tables / figure data")
    rep.add_argument("target", choices=("table1", "table2", "figure_data"))
    rep.add_argument("--out", default=None)
    rep.add_argument("--seed", type=int, default=reproduce.DEFAULT_SEED)
    rep.add_argument("--replicates", type=int, default=10_000)
    rep.add_argument("--threads", type=int, default=1)
    rep.set_defaults(func=_cmd_reproduce)

    ds = sub.add_parser("datasets", help="bundled datasets")
    ds_sub = ds.add_subparsers(dest="datasets_command", required=True)
    ds_list = ds_sub.add_parser("list", help="list bundled datasets")
    ds_list.set_defaults(func=_cmd_datasets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ValidationError, DomainError, MinimumSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        print(f"error: did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


def app() -> None:
    sys.exit(main())


if __name__ == "__main__":
    app()
