"""Residual reports: aggregation, deterministic JSON, and text tables.

A :class:`ResidualReport` summarizes one verified identity over a sample
set.  Negative controls are reports with ``control=True``: they describe a
deliberately broken input and *pass* only when the residual exceeds the
floor, demonstrating that the residual actually measures something.  The
JSON rendering is deterministic - keys sorted, floats fixed to 17
significant digits - so identical configurations produce byte-identical
reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ResidualReport",
    "all_passed",
    "render_json",
    "render_text_table",
    "report_to_dict",
]


@dataclass(frozen=True)
class ResidualReport:
    """Max/mean residual of one identity over a sample set, with verdict.

    ``tolerance`` is an upper bound for ordinary reports and a lower floor
    for control reports; ``passed`` already accounts for the inversion.
    """

    identity: str
    points: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    control: bool = False

    @staticmethod
    def from_residuals(identity, residuals, tolerance, control=False) -> "ResidualReport":
        vals = [float(r) for r in residuals]
        if not vals:
            raise ValueError(f"suite {identity!r} produced no residuals")
        worst = max(vals)
        mean = sum(vals) / len(vals)
        passed = (worst > tolerance) if control else (worst < tolerance)
        return ResidualReport(
            identity=str(identity),
            points=len(vals),
            max_residual=worst,
            mean_residual=mean,
            tolerance=float(tolerance),
            passed=bool(passed),
            control=bool(control),
        )

    @property
    def verdict(self) -> str:
        if self.control:
            return "expected-fail" if self.passed else "CONTROL-TOO-SMALL"
        return "pass" if self.passed else "FAIL"


def report_to_dict(report: ResidualReport) -> dict:
    return {
        "identity": report.identity,
        "points": report.points,
        "max_residual": report.max_residual,
        "mean_residual": report.mean_residual,
        "tolerance": report.tolerance,
        "pass": report.passed,
        "control": report.control,
    }


def all_passed(reports) -> bool:
    """True iff every non-control report passed (controls never gate)."""
    return all(r.passed for r in reports if not r.control)


def _render_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot go into a deterministic report")
    return format(float(x), ".17g")


def render_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{key}": {render_json(obj[key], indent + 1)}'
            for key in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _render_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if obj is None:
        return "null"
    raise TypeError(f"cannot render {type(obj).__name__} deterministically")


def render_text_table(reports) -> str:
    """Fixed-width table, one row per report, ending with a verdict line."""
    headers = ("identity", "points", "max", "mean", "tolerance", "verdict")
    rows = [
        (
            r.identity,
            str(r.points),
            f"{r.max_residual:.3e}",
            f"{r.mean_residual:.3e}",
            f"{r.tolerance:.1e}",
            r.verdict,
        )
        for r in reports
    ]
    widths = [
        max(len(headers[c]), *(len(row[c]) for row in rows)) if rows else len(headers[c])
        for c in range(len(headers))
    ]
    def fmt(row):
        return "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
    lines = [fmt(headers), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(row) for row in rows)
    lines.append("")
    lines.append("ALL PASS" if all_passed(reports) else "FAILURES PRESENT")
    return "\n".join(lines)
