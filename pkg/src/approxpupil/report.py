"""JSON and CSV report emission with a versioned schema."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

from . import __version__

SCHEMA_VERSION = 1
INF_TOKEN = "inf"

# Published corpus means, carried for context only; never compared against.
PUBLISHED_REFERENCE = {"corpus": "CASIA-IrisV4-Thousand + CASIA-IrisV3-Lamp",
                       "mean_psnr_db": 26.90125, "mean_ssim": 0.989025}


def _clean(value):
    if isinstance(value, float):
        if math.isinf(value):
            return INF_TOKEN if value > 0 else "-" + INF_TOKEN
        if math.isnan(value):
            return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def parse_number(value):
    """Inverse of the report's float rendering (``"inf"`` back to ``math.inf``)."""
    if value == INF_TOKEN:
        return math.inf
    if value == "-" + INF_TOKEN:
        return -math.inf
    return value


def build_report(command: str, config: dict, rows: list[dict], aggregates: dict,
                 **extra) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": config,
        "rows": rows,
        "aggregates": aggregates,
    }
    report.update(extra)
    return _clean(report)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False)


def to_csv(rows: Iterable[dict[str, Any]], columns: list[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = ["schema_version"]
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {k: ("" if v is None else v) for k, v in _clean(row).items()}
        out["schema_version"] = SCHEMA_VERSION
        writer.writerow(out)
    return buf.getvalue()


def write_report(path: str | Path | None, report: dict, columns: list[str] | None = None) -> str:
    """Write JSON or CSV by file suffix; with no path return JSON text for stdout."""
    if path is None:
        return to_json(report)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = to_csv(report["rows"], columns) if path.suffix.lower() == ".csv" else to_json(report)
    path.write_text(text)
    return text
