"""Report writers: fixed-column CSV (RFC 4180) and JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

PRICE_COLUMNS = (
    "method", "engine", "N", "M", "J", "gamma", "price", "std_error",
    "wall_time_s", "condition_max", "eta_trigger_count",
)

BREAK_COLUMNS = ("scheme", "n_paths", "steps_per_period", "interval", "mass")

RMS_COLUMNS = ("method", "rms", "time_s")

GAIN_COLUMNS = (
    "reference", "candidate", "metric", "reference_value", "candidate_value",
    "reference_time", "candidate_time", "gain",
)


def write_csv(path: str | Path, header: tuple[str, ...], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def write_json(path: str | Path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonify)
        fh.write("\n")


def _jsonify(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "__dict__"):
        return obj.__dict__
    return str(obj)


def price_report_row(report, engine: str | None = None) -> tuple:
    return (
        report.method,
        engine or report.engine_mode,
        report.n_particles,
        report.substeps,
        report.n_basis,
        "" if report.gamma is None else report.gamma,
        repr(report.price),
        repr(report.std_error),
        repr(report.wall_time_s),
        repr(report.condition_max),
        report.eta_trigger_count,
    )
