"""Mesh and table exports of two-dimensional chart slices.

A slice fixes all but two chart coordinates and samples the remaining pair
on a grid.  The sampled immersion values become a Wavefront OBJ mesh
(vertices from the first three ambient coordinates, quad faces from the
grid) and a CSV table (chart coordinates, all ambient coordinates, and
per-point residual columns).  All numbers are written with 17 significant
digits, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import anticommutation_residual, gnorm_op, point_frame
from .weierstrass import (
    SeriesChart,
    WeierstrassChain,
    WeierstrassSeed,
    associated,
    chart_complex_structure,
)

__all__ = [
    "SliceSpec",
    "export_csv",
    "export_obj",
    "export_slice",
    "slice_chart",
    "slice_from_json",
    "slice_points",
]

_FIELDS = ("f", "fbar", "ftheta")


@dataclass(frozen=True)
class SliceSpec:
    """A 2-dimensional slice of a chart: two free axes, the rest pinned."""

    axes: tuple = (0, 1)
    counts: tuple = (12, 12)
    fixed: dict = field(default_factory=dict)  # axis index -> pinned value
    box: tuple = None  # optional ((lo, hi), (lo, hi)) for the free axes
    field_name: str = "f"
    theta: float = 0.0

    def __post_init__(self):
        if len(self.axes) != 2 or self.axes[0] == self.axes[1]:
            raise DomainError("a slice needs two distinct free axes")
        if len(self.counts) != 2:
            raise DomainError("a slice needs two grid counts")
        if any(int(c) < 2 for c in self.counts):
            raise DomainError("slice grids need at least 2 points per axis")
        if self.field_name not in _FIELDS:
            raise DomainError(f"unknown field {self.field_name!r}; choose from {_FIELDS}")


def slice_from_json(data: dict) -> SliceSpec:
    """Build a :class:`SliceSpec` from its JSON form (all keys optional)."""
    if not isinstance(data, dict):
        raise DomainError("slice spec must be a JSON object")
    known = {"axes", "counts", "fixed", "box", "field", "theta"}
    unknown = set(data) - known
    if unknown:
        raise DomainError(f"unknown slice keys {sorted(unknown)}; known: {sorted(known)}")
    fixed = {int(k): float(v) for k, v in dict(data.get("fixed", {})).items()}
    box = data.get("box")
    if box is not None:
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if len(box) != 2:
            raise DomainError("slice box needs one (lo, hi) pair per free axis")
    return SliceSpec(
        axes=tuple(int(a) for a in data.get("axes", (0, 1))),
        counts=tuple(int(c) for c in data.get("counts", (12, 12))),
        fixed=fixed,
        box=box,
        field_name=str(data.get("field", "f")),
        theta=float(data.get("theta", 0.0)),
    )


def slice_chart(
    seed: WeierstrassSeed, spec: SliceSpec, chain: WeierstrassChain | None = None
) -> SeriesChart:
    """The family member the slice samples: f, fbar, or the theta member."""
    theta = {"f": 0.0, "fbar": math.pi / 2, "ftheta": spec.theta}[spec.field_name]
    return associated(seed, theta, chain)


def slice_points(chart: SeriesChart, spec: SliceSpec) -> np.ndarray:
    """The (nu * nv, d) grid of chart coordinates the slice visits.

    Row order is u-major: the point at grid index (i, j) is row i * nv + j.
    Raises :class:`DomainError` when an axis is out of range, a pinned
    value is missing, or any sample leaves the chart domain.
    """
    d = chart.d
    ax_u, ax_v = spec.axes
    if not (0 <= ax_u < d and 0 <= ax_v < d):
        raise DomainError(f"slice axes {spec.axes} out of range for a {d}-coordinate chart")
    for a in spec.fixed:
        if not 0 <= a < d:
            raise DomainError(f"pinned axis {a} out of range for a {d}-coordinate chart")
        if a in spec.axes:
            raise DomainError(f"axis {a} is both free and pinned")
    # axes that are neither free nor pinned sit at coordinate 0
    rest = [a for a in range(d) if a not in spec.axes]
    base = np.zeros(d)
    for a in rest:
        base[a] = spec.fixed.get(a, 0.0)
    if spec.box is None:
        box_u = chart.box[ax_u]
        box_v = chart.box[ax_v]
    else:
        box_u, box_v = spec.box
    nu, nv = (int(c) for c in spec.counts)
    us = np.linspace(box_u[0], box_u[1], nu)
    vs = np.linspace(box_v[0], box_v[1], nv)
    pts = np.tile(base, (nu * nv, 1))
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    pts[:, ax_u] = uu.ravel()
    pts[:, ax_v] = vv.ravel()
    for p in pts:
        if not chart.domain_contains(p):
            raise DomainError(f"slice leaves the chart domain at {p}")
    return pts


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_obj(path, values: np.ndarray, counts, name: str = "slice") -> None:
    """Write an OBJ mesh: grid vertices and quad faces.

    Vertices take the first three ambient coordinates of ``values`` (rows
    in u-major grid order); faces are the grid quads, 1-indexed.
    """
    values = np.asarray(values, dtype=np.float64)
    nu, nv = (int(c) for c in counts)
    if values.shape[0] != nu * nv:
        raise DomainError(f"value rows ({values.shape[0]}) must equal nu*nv ({nu * nv})")
    if values.shape[1] < 3:
        raise DomainError("OBJ export needs at least three ambient coordinates")
    lines = [f"o {name}"]
    for row in values:
        lines.append(f"v {_fmt(row[0])} {_fmt(row[1])} {_fmt(row[2])}")
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            b = (i + 1) * nv + j + 1
            c = (i + 1) * nv + j + 2
            e = i * nv + j + 2
            lines.append(f"f {a} {b} {c} {e}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_csv(path, coords: np.ndarray, values: np.ndarray, residuals: dict) -> None:
    """Write a CSV table: chart coordinates, ambient values, residuals."""
    coords = np.asarray(coords, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if coords.shape[0] != values.shape[0]:
        raise DomainError("coordinate and value row counts differ")
    res_items = sorted(residuals.items())
    for key, col in res_items:
        if len(col) != coords.shape[0]:
            raise DomainError(f"residual column {key!r} has the wrong length")
    header = (
        [f"x{k}" for k in range(coords.shape[1])]
        + [f"f{k}" for k in range(values.shape[1])]
        + [key for key, _ in res_items]
    )
    lines = [",".join(header)]
    for r in range(coords.shape[0]):
        cells = [_fmt(v) for v in coords[r]]
        cells += [_fmt(v) for v in values[r]]
        cells += [_fmt(res_items[k][1][r]) for k in range(len(res_items))]
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_slice(
    seed: WeierstrassSeed,
    spec: SliceSpec,
    obj_path,
    csv_path,
    chain: WeierstrassChain | None = None,
    name: str = "slice",
) -> int:
    """Sample the slice and write both files; returns the point count.

    The CSV carries two analytic per-point residual columns: the
    minimality defect |trace A| / ||A|| and the anticommutation defect
    ||A J + J A|| / ||A||.
    """
    chart = slice_chart(seed, spec, chain)
    pts = slice_points(chart, spec)
    values = chart.values(pts)
    J = chart_complex_structure(chart.d)
    minim = np.empty(len(pts))
    antic = np.empty(len(pts))
    for k, p in enumerate(pts):
        fr = point_frame(chart.jet(p))
        scale = max(gnorm_op(fr.chol, fr.shape_operator), 1e-14)
        minim[k] = abs(float(np.trace(fr.shape_operator))) / scale
        antic[k] = anticommutation_residual(fr, J)
    export_obj(obj_path, values, spec.counts, name=name)
    export_csv(csv_path, pts, values, {"minimality": minim, "anticommutation": antic})
    return len(pts)
