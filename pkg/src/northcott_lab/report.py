"""Experiment reports and their JSON / CSV serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .curve import Curve, Point
from .estimate import HeightEstimate
from .nf import AlgNumber, FieldSpec, IntPoly

SIG_DIGITS = 12


def fmt_float(v: float) -> Any:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(format(v, f".{SIG_DIGITS}g"))


def fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def normalize(value: Any) -> Any:
    """Convert library values into plain JSON-compatible data."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, Fraction):
        return fmt_fraction(value)
    if isinstance(value, HeightEstimate):
        return {"value": fmt_float(value.value), "radius": fmt_float(value.radius), "exact": value.exact}
    if isinstance(value, (AlgNumber, Point, Curve, FieldSpec, IntPoly)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if hasattr(value, "__int__") and not hasattr(value, "__float__"):
        return int(value)
    if hasattr(value, "__float__"):
        return fmt_float(float(value))
    return str(value)


@dataclass
class ExperimentReport:
    command: str
    config: dict
    result: dict
    version: str
    columns: Optional[list[str]] = None
    rows: Optional[list[dict]] = None
    timing: Optional[float] = None
    passed: bool = True

    def payload(self) -> dict:
        out = {"command": self.command, "version": self.version,
               "config": normalize(self.config), "result": normalize(self.result)}
        if self.rows is not None:
            out["rows"] = normalize(self.rows)
        if self.timing is not None:
            out["timing"] = {"seconds": fmt_float(self.timing)}
        return out

    @classmethod
    def from_payload(cls, data: dict) -> ExperimentReport:
        rows = data.get("rows")
        return cls(data["command"], data["config"], data["result"], data["version"],
                   list(rows[0].keys()) if rows else None, rows,
                   data.get("timing", {}).get("seconds"))


def emit(report: ExperimentReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.payload(), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if report.columns is not None:
            w.writerow(report.columns)
            for row in normalize(report.rows or []):
                w.writerow(["" if row.get(c) is None else _cell(row.get(c)) for c in report.columns])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(normalize(report.result)):
                w.writerow([k, _cell(v)])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def _flatten(d: Any, prefix: str = ""):
    if isinstance(d, dict):
        for k, v in d.items():
            yield from _flatten(v, f"{prefix}{k}.")
    else:
        yield prefix.rstrip("."), d
