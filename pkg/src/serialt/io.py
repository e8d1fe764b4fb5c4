"""Dataset ingestion and machine-readable report emission.

Input CSV carries a header of either ``index,value`` (one series) or
``index,a,b`` (two series / paired columns); the index must be
consecutive ascending integers and values finite decimals.  Lines
starting with ``#`` are comments (the bundled datasets carry provenance
that way).

Machine outputs: JSON is dumped sorted and indented, floats at full
round-trip precision; CSV is RFC-4180 (CRLF, quoted as needed) with a
fixed column order.  Identical inputs therefore produce byte-identical
outputs.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Sequence

from .errors import ValidationError
from .estimate import Series
from .mc import McSummary
from .ttests import TestResult


def _split_csv_line(line: str) -> list[str]:
    return [field.strip() for field in line.split(",")]


def parse_series_text(text: str, origin: str = "<inline>") -> Series | tuple[Series, Series]:
    """Parse series CSV text; returns one Series or an (a, b) pair."""
    header: list[str] | None = None
    paired = False
    indices: list[int] = []
    first: list[float] = []
    second: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = _split_csv_line(line)
        if header is None:
            lowered = [f.lower() for f in fields]
            if lowered == ["index", "value"]:
                paired = False
            elif lowered == ["index", "a", "b"]:
                paired = True
            else:
                raise ValidationError(
                    f"{origin}:{lineno}: header must be 'index,value' or 'index,a,b', "
                    f"got {line!r}"
                )
            header = lowered
            continue
        if len(fields) != len(header):
            raise ValidationError(
                f"{origin}:{lineno}: expected {len(header)} fields, got {len(fields)}"
            )
        try:
            idx = int(fields[0])
        except ValueError:
            raise ValidationError(
                f"{origin}:{lineno}: index must be an integer, got {fields[0]!r}"
            ) from None
        if indices and idx != indices[-1] + 1:
            raise ValidationError(
                f"{origin}:{lineno}: index must be consecutive ascending "
                f"(got {idx} after {indices[-1]})"
            )
        indices.append(idx)
        for column, store in zip(fields[1:], (first, second)):
            try:
                value = float(column)
            except ValueError:
                raise ValidationError(
                    f"{origin}:{lineno}: value must be a decimal number, got {column!r}"
                ) from None
            if not math.isfinite(value):
                raise ValidationError(f"{origin}:{lineno}: value must be finite")
            store.append(value)
    if header is None:
        raise ValidationError(f"{origin}: empty input (no header line)")
    if not indices:
        raise ValidationError(f"{origin}: no data rows")
    if len(first) < 2:
        raise ValidationError(f"{origin}: need at least 2 observations, got {len(first)}")
    if paired:
        return Series(first, label="a"), Series(second, label="b")
    return Series(first)


def ingest_series(path: str | Path) -> Series | tuple[Series, Series]:
    """Read and parse a series CSV file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {p}: {exc}") from None
    return parse_series_text(text, origin=str(p))


def fmt_float(x: float) -> str:
    """Full-precision, round-trippable float text for machine outputs."""
    return repr(float(x))


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """RFC-4180 CSV with a fixed column order; floats at full precision."""
    buf = _io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(
            [fmt_float(v) if isinstance(v, float) else v for v in row]
        )
    path.write_bytes(buf.getvalue().encode("utf-8"))


def result_to_dict(res: TestResult) -> dict[str, Any]:
    return {
        "statistic": res.statistic,
        "df": res.df,
        "p_value": res.p_value,
        "side": res.side.value,
        "effect": res.effect,
        "se": res.se,
        "rho_used": res.rho_used,
        "method": res.method.value,
        "kind": res.kind.value,
        "flags": res.flags.names(),
    }


RESULT_CSV_COLUMNS = (
    "kind", "method", "side", "alpha", "statistic", "df", "p_value",
    "effect", "se", "rho_used", "flags",
)


def result_to_row(res: TestResult, alpha: float) -> list[Any]:
    return [
        res.kind.value,
        res.method.value,
        res.side.value,
        float(alpha),
        float(res.statistic),
        float(res.df),
        float(res.p_value),
        float(res.effect),
        float(res.se),
        float(res.rho_used),
        "|".join(res.flags.names()),
    ]


MC_CSV_COLUMNS = (
    "kind", "m", "rho", "rho_pair", "replicates", "n_degenerate",
    "serial_reject", "usual_reject", "serial_se", "usual_se", "mean_r",
)


def mc_summary_rows(summary: McSummary) -> list[list[Any]]:
    return [
        [
            cell.kind.value, cell.m, float(cell.rho), float(cell.rho_pair),
            cell.replicates, cell.n_degenerate,
            float(cell.serial_reject), float(cell.usual_reject),
            float(cell.serial_se), float(cell.usual_se), float(cell.mean_r),
        ]
        for cell in summary.cells
    ]


def mc_summary_to_dict(summary: McSummary) -> dict[str, Any]:
    cfg = summary.config
    return {
        "config": {
            "kind": cfg.kind.value,
            "seed": cfg.seed,
            "m_values": list(cfg.m_values),
            "rho_values": list(cfg.rho_values),
            "rho_pair_values": list(cfg.rho_pair_values),
            "sigma2": cfg.sigma2,
            "replicates": cfg.replicates,
            "alpha": cfg.alpha,
            "side": cfg.side.value,
            "effect": cfg.effect,
        },
        "cells": [
            {
                "kind": cell.kind.value,
                "m": cell.m,
                "rho": cell.rho,
                "rho_pair": cell.rho_pair,
                "replicates": cell.replicates,
                "n_degenerate": cell.n_degenerate,
                "serial_reject": cell.serial_reject,
                "usual_reject": cell.usual_reject,
                "serial_se": cell.serial_se,
                "usual_se": cell.usual_se,
                "mean_r": cell.mean_r,
            }
            for cell in summary.cells
        ],
    }
