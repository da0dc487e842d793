"""Named verification suites run over a constructed chart.

Each suite measures one identity of the construction on a sample grid and
returns :class:`~minkaehler.report.ResidualReport` rows; suites that ship a
negative control append a second row (``<name>_control``) built from a
deliberately broken input, which must land *above* ``CONTROL_FLOOR`` for
the control to count as behaving.

The registered names:

``minimality``             |trace A| / ||A||, pointwise
``rank``                   shape-operator rank equals the expected rank
``family_metric``          induced metrics across the phase family match
``family_normal``          unit normals across the phase family match
``family_shape``           A_theta = cos(theta) A + sin(theta) A J
``anticommutation``        A J + J A = 0
``kaehler_parallel``       covariant derivative of J vanishes
``bending_condition``      the conjugate field is an infinitesimal bending
``gauss_preservation``     the conjugate field keeps the unit normal
``bending_tpar``           the tangential part of the conjugate is parallel
``bending_bat``            B equals A composed with the tangential part
``fundamental_wedge``      linearized curvature identity for (A, B)
``codazzi_b``              B satisfies the Codazzi symmetry
``b_three_route``          the three independent B computations agree
``rotation``               the tangential part rotates by a constant c = 1
``nullity_in_bending_kernel``  B annihilates relative-nullity directions
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bending import (
    B_by_formula,
    ChartField,
    TrivialField,
    CallableField,
    b_route_agreement,
    bat_residual,
    bending_residual,
    codazzi_b_residual,
    conjugate_field,
    fundamental_equation_residual,
    gauss_tangency_residual,
    make_trivial,
    normal_variation_residual,
    nullity_annihilation_residual,
    parallel_tangential_residual,
    rotation_coefficient,
)
from .charts import FD_STEP_D1, FD_STEP_D2, grid_points, random_points, shrink_box
from .geometry import (
    FD_STEP_NOISY,
    codazzi_residual,
    gnorm_op,
    parallel_J_residual,
    point_frame,
    rank_and_nullity,
)
from .report import ResidualReport
from .seeds import EXPECTED_RESIDUALS
from .weierstrass import (
    SeriesChart,
    WeierstrassChain,
    WeierstrassSeed,
    associated,
    build_chain,
    chart_complex_structure,
    immersion_f,
    validate_seed,
)

__all__ = [
    "CONTROL_FLOOR",
    "DEFAULT_RNG_SEED",
    "DEFAULT_TOLERANCES",
    "SUITE_ORDER",
    "ChartBundle",
    "build_bundle",
    "default_counts",
    "default_suites",
    "run_suites",
]

DEFAULT_RNG_SEED = 20260816

# Floor every negative control must exceed to prove the residual has teeth.
CONTROL_FLOOR = 1e-2

# Per-identity default tolerances.  Analytic routes (series jets and exact
# linear algebra only) get 1e-7 or better; finite-difference routes get
# 10 h^2 for the step h they use; agreement across independent routes gets
# 100 max(eps^2, h^2).
DEFAULT_TOLERANCES = {
    "minimality": 1e-8,
    "rank": 0.5,
    "family_metric": 1e-10,
    "family_normal": 1e-10,
    "family_shape": 1e-7,
    "anticommutation": 1e-7,
    "kaehler_parallel": 10 * FD_STEP_NOISY**2,
    "bending_condition": 1e-7,
    "gauss_preservation": 1e-7,
    "bending_tpar": 10 * FD_STEP_D2**2,
    "bending_bat": 1e-7,
    "fundamental_wedge": 1e-7,
    "codazzi_b": 10 * FD_STEP_NOISY**2,
    "b_three_route": 100 * max(1e-4**2, FD_STEP_D1**2),
    "rotation": 1e-6,
    "nullity_in_bending_kernel": 1e-6,
}

_FAMILY_THETAS = tuple(k * math.pi / 6 for k in range(1, 6))
_ROUTE_POINTS = 30  # sampled points for the route-agreement and rotation suites


def default_counts(d: int):
    """Default grid counts per coordinate for a d-dimensional chart."""
    if d == 2:
        return [10, 10]
    if d == 4:
        return [4, 4, 3, 3]
    return [4, 4] + [2] * (d - 2)


@dataclass
class ChartBundle:
    """A constructed chart with everything the suites consume."""

    seed: WeierstrassSeed
    chain: WeierstrassChain
    chart: SeriesChart
    points: np.ndarray
    rng_seed: int = DEFAULT_RNG_SEED
    expected_rank: int = 2
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.chart.d

    @property
    def J(self) -> np.ndarray:
        return chart_complex_structure(self.chart.d)

    @property
    def conjugate(self) -> ChartField:
        if "conjugate" not in self._cache:
            self._cache["conjugate"] = conjugate_field(self.chart)
        return self._cache["conjugate"]

    def frame(self, p):
        key = np.asarray(p, dtype=np.float64).tobytes()
        if key not in self._cache.setdefault("frames", {}):
            self._cache["frames"][key] = point_frame(self.chart.jet(p))
        return self._cache["frames"][key]

    def route_points(self, stream: int) -> np.ndarray:
        """Deterministic random interior points for the sampled suites."""
        rng = np.random.default_rng(self.rng_seed + stream)
        box = shrink_box(self.chart.box, 0.9)
        return random_points(box, _ROUTE_POINTS, rng)


def build_bundle(
    seed: WeierstrassSeed,
    counts=None,
    box=None,
    margin: float = 0.9,
    rng_seed: int = DEFAULT_RNG_SEED,
) -> ChartBundle:
    """Validate the seed, run the recursion, and sample the chart box."""
    validate_seed(seed)
    chain = build_chain(seed)
    chart = immersion_f(seed, chain, box=box)
    if counts is None:
        counts = default_counts(chart.d)
    counts = [int(c) for c in counts]
    if len(counts) != chart.d:
        raise ValueError(
            f"sampling counts must list {chart.d} axes, got {len(counts)}"
        )
    if any(c < 2 for c in counts):
        raise ValueError("sampling needs at least 2 points per axis")
    pts = grid_points(shrink_box(chart.box, margin), counts)
    return ChartBundle(seed=seed, chain=chain, chart=chart, points=pts, rng_seed=rng_seed)


# -- individual suites ---------------------------------------------------------

def _suite_minimality(b: ChartBundle, tol: float):
    res = []
    for p in b.points:
        fr = b.frame(p)
        scale = max(gnorm_op(fr.chol, fr.shape_operator), 1e-14)
        res.append(abs(float(np.trace(fr.shape_operator))) / scale)
    return [ResidualReport.from_residuals("minimality", res, tol)]


def _suite_rank(b: ChartBundle, tol: float):
    res = []
    for p in b.points:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            try:
                rr = rank_and_nullity(b.frame(p))
                res.append(abs(rr.rank - b.expected_rank))
            except Warning:
                res.append(1.0)  # indeterminate spectrum counts as a miss
    return [ResidualReport.from_residuals("rank", res, tol)]


def _family_residuals(b: ChartBundle):
    """Metric/normal/shape deviations across the phase family (cached)."""
    if "family" in b._cache:
        return b._cache["family"]
    metric = np.zeros(len(b.points))
    normal = np.zeros(len(b.points))
    shape = np.zeros(len(b.points))
    J = b.J
    base = [b.frame(p) for p in b.points]
    for theta in _FAMILY_THETAS:
        mate = associated(b.seed, theta, b.chain, box=b.chart.box)
        blend = math.cos(theta) * np.eye(b.d) + math.sin(theta) * J
        for k, p in enumerate(b.points):
            fr0 = base[k]
            fr = point_frame(mate.jet(p))
            gscale = max(float(np.linalg.norm(fr0.metric)), 1e-14)
            ascale = max(float(np.linalg.norm(fr0.shape_operator)), 1e-14)
            metric[k] = max(metric[k], float(np.linalg.norm(fr.metric - fr0.metric)) / gscale)
            normal[k] = max(normal[k], float(np.linalg.norm(fr.normal - fr0.normal)))
            expected = fr0.shape_operator @ blend
            shape[k] = max(shape[k], float(np.linalg.norm(fr.shape_operator - expected)) / ascale)
    b._cache["family"] = (metric, normal, shape)
    return b._cache["family"]


def _suite_family_metric(b: ChartBundle, tol: float):
    metric, _, _ = _family_residuals(b)
    return [ResidualReport.from_residuals("family_metric", metric, tol)]


def _suite_family_normal(b: ChartBundle, tol: float):
    _, normal, _ = _family_residuals(b)
    return [ResidualReport.from_residuals("family_normal", normal, tol)]


def _suite_family_shape(b: ChartBundle, tol: float):
    _, _, shape = _family_residuals(b)
    return [ResidualReport.from_residuals("family_shape", shape, tol)]


def _suite_anticommutation(b: ChartBundle, tol: float):
    from .geometry import anticommutation_residual

    res = [anticommutation_residual(b.frame(p), b.J) for p in b.points]
    return [ResidualReport.from_residuals("anticommutation", res, tol)]


def _suite_kaehler_parallel(b: ChartBundle, tol: float):
    res = [parallel_J_residual(b.chart, b.J, p, h=FD_STEP_NOISY) for p in b.points]
    return [ResidualReport.from_residuals("kaehler_parallel", res, tol)]


def _suite_bending_condition(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [bending_residual(b.chart, T, p) for p in b.points]
    # control: the position field scales the metric, it never bends
    bad = ChartField(b.chart)
    ctrl = [bending_residual(b.chart, bad, p) for p in b.points]
    return [
        ResidualReport.from_residuals("bending_condition", res, tol),
        ResidualReport.from_residuals("bending_condition_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _deterministic_trivial(b: ChartBundle, stream: int) -> TrivialField:
    rng = np.random.default_rng(b.rng_seed + stream)
    return make_trivial(b.chart, rng=rng)


def _suite_gauss_preservation(b: ChartBundle, tol: float):
    T = b.conjugate
    res = []
    for p in b.points:
        res.append(gauss_tangency_residual(b.chart, T, p))
        res.append(normal_variation_residual(b.chart, T, p))
    # control: a generic rigid rotation tilts the normal at first order
    bad = _deterministic_trivial(b, stream=101)
    ctrl = [
        max(gauss_tangency_residual(b.chart, bad, p), normal_variation_residual(b.chart, bad, p))
        for p in b.points
    ]
    return [
        ResidualReport.from_residuals("gauss_preservation", res, tol),
        ResidualReport.from_residuals("gauss_preservation_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _quadratic_control_field(b: ChartBundle) -> CallableField:
    """T = x0^2 e0 + x1^2 e1: a smooth field whose tangential part is
    visibly non-parallel (its derivative grows linearly in the coordinates)."""
    m1 = b.chart.ambient
    d = b.chart.d

    def value(p):
        out = np.zeros(m1)
        out[0] = p[0] ** 2
        out[1] = p[1] ** 2
        return out

    def d1(p):
        out = np.zeros((d, m1))
        out[0, 0] = 2 * p[0]
        out[1, 1] = 2 * p[1]
        return out

    def d2(p):
        out = np.zeros((d, d, m1))
        out[0, 0, 0] = 2.0
        out[1, 1, 1] = 2.0
        return out

    return CallableField(d=d, ambient=m1, value_fn=value, d1_fn=d1, d2_fn=d2)


def _suite_bending_tpar(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [parallel_tangential_residual(b.chart, T, p, h=FD_STEP_D2) for p in b.points]
    bad = _quadratic_control_field(b)
    ctrl = [parallel_tangential_residual(b.chart, bad, p, h=FD_STEP_D2) for p in b.points]
    return [
        ResidualReport.from_residuals("bending_tpar", res, tol),
        ResidualReport.from_residuals("bending_tpar_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _suite_bending_bat(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [bat_residual(b.chart, T, p) for p in b.points]
    # control: a trivial field has B = 0 but a nonzero tangential part
    bad = _deterministic_trivial(b, stream=202)
    ctrl = [bat_residual(b.chart, bad, p) for p in b.points]
    return [
        ResidualReport.from_residuals("bending_bat", res, tol),
        ResidualReport.from_residuals("bending_bat_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _suite_fundamental_wedge(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [fundamental_equation_residual(b.chart, T, p) for p in b.points]
    # control: the position field's bending tensor is the second fundamental
    # form itself, and the wedge of A with A is the (nonzero) curvature
    bad = ChartField(b.chart)
    ctrl = [fundamental_equation_residual(b.chart, bad, p) for p in b.points]
    return [
        ResidualReport.from_residuals("fundamental_wedge", res, tol),
        ResidualReport.from_residuals("fundamental_wedge_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _suite_codazzi_b(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [codazzi_b_residual(b.chart, T, p) for p in b.points]
    # control: a generic operator field linear in the coordinates
    rng = np.random.default_rng(b.rng_seed + 303)
    raw0 = rng.standard_normal((b.d, b.d))
    raw1 = rng.standard_normal((b.d, b.d))
    S0 = raw0 + raw0.T
    S1 = raw1 + raw1.T

    def bad_field(q):
        return S0 + q[0] * S1

    ctrl = [codazzi_residual(b.chart, bad_field, p) for p in b.points]
    return [
        ResidualReport.from_residuals("codazzi_b", res, tol),
        ResidualReport.from_residuals("codazzi_b_control", ctrl, CONTROL_FLOOR, control=True),
    ]


def _suite_b_three_route(b: ChartBundle, tol: float):
    T = b.conjugate
    res = [b_route_agreement(b.chart, T, p) for p in b.route_points(stream=1)]
    return [ResidualReport.from_residuals("b_three_route", res, tol)]


def _suite_rotation(b: ChartBundle, tol: float):
    T = b.conjugate
    pts = b.route_points(stream=2)
    data = [rotation_coefficient(b.chart, T, p, J=b.J) for p in pts]
    cs = [r.coefficient for r in data]
    res = [abs(c - 1.0) for c in cs]
    res.append(max(cs) - min(cs))  # point-independence of c
    res.extend(r.fit_residual for r in data)
    return [ResidualReport.from_residuals("rotation", res, tol)]


def _suite_nullity_kernel(b: ChartBundle, tol: float):
    if b.d <= 2:
        raise ValueError(
            "nullity_in_bending_kernel needs a chart with relative nullity (d > 2)"
        )
    T = b.conjugate
    res = []
    for p in b.points:
        fr = b.frame(p)
        rr = rank_and_nullity(fr)
        b_op = B_by_formula(b.chart, T, p).op
        res.append(nullity_annihilation_residual(fr, b_op, rr.nullity_basis))
    return [ResidualReport.from_residuals("nullity_in_bending_kernel", res, tol)]


SUITE_ORDER = (
    "minimality",
    "rank",
    "family_metric",
    "family_normal",
    "family_shape",
    "anticommutation",
    "kaehler_parallel",
    "bending_condition",
    "gauss_preservation",
    "bending_tpar",
    "bending_bat",
    "fundamental_wedge",
    "codazzi_b",
    "b_three_route",
    "rotation",
    "nullity_in_bending_kernel",
)

_SUITES = {
    "minimality": _suite_minimality,
    "rank": _suite_rank,
    "family_metric": _suite_family_metric,
    "family_normal": _suite_family_normal,
    "family_shape": _suite_family_shape,
    "anticommutation": _suite_anticommutation,
    "kaehler_parallel": _suite_kaehler_parallel,
    "bending_condition": _suite_bending_condition,
    "gauss_preservation": _suite_gauss_preservation,
    "bending_tpar": _suite_bending_tpar,
    "bending_bat": _suite_bending_bat,
    "fundamental_wedge": _suite_fundamental_wedge,
    "codazzi_b": _suite_codazzi_b,
    "b_three_route": _suite_b_three_route,
    "rotation": _suite_rotation,
    "nullity_in_bending_kernel": _suite_nullity_kernel,
}


def default_suites(bundle: ChartBundle) -> list:
    """Suites run when the config names none.

    Built-in seeds run exactly the suites in their expected-residual
    manifest; other seeds run everything applicable to their dimension.
    """
    name = bundle.seed.name
    if name in EXPECTED_RESIDUALS:
        manifest = EXPECTED_RESIDUALS[name]
        return [s for s in SUITE_ORDER if s in manifest]
    skip = {"nullity_in_bending_kernel"} if bundle.d <= 2 else set()
    return [s for s in SUITE_ORDER if s not in skip]


def run_suites(bundle: ChartBundle, names=None, tolerances=None) -> list:
    """Run the named suites (default per seed) and return report rows."""
    if names is None:
        names = default_suites(bundle)
    overrides = dict(tolerances or {})
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise ValueError(
            f"unknown suites {unknown}; registered: {', '.join(SUITE_ORDER)}"
        )
    bad_tol = [n for n in overrides if n not in _SUITES]
    if bad_tol:
        raise ValueError(
            f"tolerance overrides for unknown suites {bad_tol}; "
            f"registered: {', '.join(SUITE_ORDER)}"
        )
    reports = []
    for name in names:
        tol = float(overrides.get(name, DEFAULT_TOLERANCES[name]))
        reports.extend(_SUITES[name](bundle, tol))
    return reports
