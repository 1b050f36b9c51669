"""Machine-readable run reports.

A report is canonical JSON: UTF-8, LF, sorted keys, fixed float formatting
via repr, and no volatile fields (wall time is carried in memory and on
stderr but excluded from the canonical body so identical runs are
byte-identical).  Each check carries a stable anchor string naming the
mathematical fact it verifies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError

TOOL_VERSION = "cuspmass 0.1.0"

_STATUSES = ("pass", "fail", "recorded")


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: object
    tolerance: object
    anchor: str

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise DomainError(f"check status must be one of {_STATUSES}, got {self.status!r}")


@dataclass
class Report:
    subcommand: str
    inputs_echo: dict
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    tool_version: str = TOOL_VERSION
    wall_time_ms: int = 0

    def add_check(self, name: str, status: str, value, tolerance, anchor: str) -> None:
        self.checks.append(Check(name, status, value, tolerance, anchor))

    def check(self, name: str, ok: bool, value, tolerance, anchor: str) -> None:
        self.add_check(name, "pass" if ok else "fail", value, tolerance, anchor)

    def record(self, name: str, value, anchor: str, tolerance=None) -> None:
        self.add_check(name, "recorded", value, tolerance, anchor)

    @property
    def all_pass(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def canonical_body(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "subcommand": self.subcommand,
            "inputs_echo": _jsonable(self.inputs_echo),
            "results": _jsonable(self.results),
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "value": _jsonable(c.value),
                    "tolerance": _jsonable(c.tolerance),
                    "anchor": c.anchor,
                }
                for c in self.checks
            ],
        }


def _jsonable(obj):
    """Deterministic JSON-compatible projection of result values."""
    from fractions import Fraction

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, float):
        return repr(float(obj))  # plain-float repr round-trips and is bit-stable
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": repr(obj.real), "im": repr(obj.imag)}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    try:
        import numpy as np

        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return repr(float(obj))
    except ImportError:  # pragma: no cover
        pass
    return str(obj)


def render_json(report: Report) -> str:
    return json.dumps(report.canonical_body(), sort_keys=True, indent=2) + "\n"


def render_csv_summary(report: Report) -> str:
    lines = ["name,status,value,tolerance"]
    for c in report.checks:
        val = _jsonable(c.value)
        tol = _jsonable(c.tolerance)
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True, separators=(",", ":"))
        if isinstance(tol, (dict, list)):
            tol = json.dumps(tol, sort_keys=True, separators=(",", ":"))
        lines.append(f"{c.name},{c.status},{val},{tol}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, path, fmt: str = "json") -> None:
    """Write the canonical rendering; UTF-8 with LF endings."""
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv-summary":
        text = render_csv_summary(report)
    else:
        raise DomainError(f"unknown report format {fmt!r}")
    Path(path).write_bytes(text.encode("utf-8"))


def parse_report_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
