"""Orthogonal curvilinear charts and quaternion-valued fields over them.

A chart maps coordinates ``(q1, q2, q3)`` to Cartesian ``(x, y, z)``.  Its
metric coefficients are ``h_i = |dr/dq_i|`` and its local frame is
``u_i = (dr/dq_i) / h_i``.  Fields store their vector components in that local
frame, never in Cartesian components.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import jsonschema
import numpy as np

from .errors import (
    DefinitionError,
    DegenerateMetric,
    ExprError,
    NonOrthogonalChart,
    OutOfDomain,
    UnknownChart,
)
from .expr import Const, Expr, Var, diff, evaluate_many, parse, sqrt, substitute
from .expr.nodes import ZERO
from .quatcore import Quaternion

METRIC_FLOOR = 1e-12
ORTHO_TOL = 1e-8
FRAME_TOL = 1e-10

ALIASES = ("q1", "q2", "q3")

Bound = Optional[float]


@dataclass(frozen=True)
class Domain:
    """Open coordinate box ``lo_i < q_i < hi_i``; ``None`` means unbounded."""

    bounds: tuple[tuple[Bound, Bound], tuple[Bound, Bound], tuple[Bound, Bound]] = (
        (None, None),
        (None, None),
        (None, None),
    )

    def mask(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        ok = np.all(np.isfinite(points), axis=1)
        for i, (lo, hi) in enumerate(self.bounds):
            if lo is not None:
                ok &= points[:, i] > lo
            if hi is not None:
                ok &= points[:, i] < hi
        return ok

    def contains(self, point: Sequence[float]) -> bool:
        return bool(self.mask(np.asarray(point, dtype=float))[0])

    def describe(self, names: Sequence[str]) -> str:
        parts = []
        for name, (lo, hi) in zip(names, self.bounds):
            if lo is None and hi is None:
                continue
            if lo is None:
                parts.append(f"{name} < {hi:.17g}")
            elif hi is None:
                parts.append(f"{name} > {lo:.17g}")
            else:
                parts.append(f"{lo:.17g} < {name} < {hi:.17g}")
        return ", ".join(parts) or "all of R^3"


@dataclass(frozen=True, eq=False)
class Chart:
    name: str
    coord_names: tuple[str, str, str]
    maps: tuple[Expr, Expr, Expr]
    metric_override: Optional[tuple[Expr, Expr, Expr]] = None
    domain: Domain = field(default_factory=Domain)
    domain_text: str = ""
    validated: bool = False

    def __post_init__(self):
        names = tuple(self.coord_names)
        if len(names) != 3 or len(set(names)) != 3:
            raise DefinitionError(f"chart {self.name!r} needs three distinct coordinate names")
        object.__setattr__(self, "coord_names", names)
        allowed = set(names)
        for e in tuple(self.maps) + tuple(self.metric_override or ()):
            if not e.free_symbols <= allowed:
                extra = ", ".join(sorted(e.free_symbols - allowed))
                raise DefinitionError(f"chart {self.name!r} references unknown symbol(s) {extra}")

    @cached_property
    def jacobian(self) -> tuple[tuple[Expr, Expr, Expr], ...]:
        """``jacobian[i][k] = d(map_k)/d(q_i)``: row i is the tangent dr/dq_i."""
        return tuple(tuple(diff(m, q) for m in self.maps) for q in self.coord_names)

    @cached_property
    def jacobian_metric(self) -> tuple[Expr, Expr, Expr]:
        return tuple(sqrt(col[0] * col[0] + col[1] * col[1] + col[2] * col[2]) for col in self.jacobian)

    @property
    def metric(self) -> tuple[Expr, Expr, Expr]:
        return self.metric_override if self.metric_override is not None else self.jacobian_metric

    @cached_property
    def frame_exprs(self) -> tuple[tuple[Expr, Expr, Expr], ...]:
        return tuple(tuple(c / h for c in col) for col, h in zip(self.jacobian, self.metric))

    def env(self, points: np.ndarray) -> dict[str, np.ndarray]:
        points = np.atleast_2d(points)
        return {name: points[:, i] for i, name in enumerate(self.coord_names)}

    def symbols(self, params: Iterable[str] = ()) -> set[str]:
        return set(self.coord_names) | set(ALIASES) | set(params)

    def require_domain(self, points) -> np.ndarray:
        """Return points as an (N, 3) array, raising OutOfDomain for any bad row."""
        pts = as_points(points)
        ok = self.domain.mask(pts)
        if not np.all(ok):
            bad = pts[np.argmin(ok)]
            coords = ", ".join(f"{n}={v:g}" for n, v in zip(self.coord_names, bad))
            raise OutOfDomain(
                f"point ({coords}) is outside the {self.name} chart domain "
                f"({self.domain_text or self.domain.describe(self.coord_names)})",
                point=tuple(float(v) for v in bad),
            )
        return pts

    def __repr__(self):
        return f"Chart({self.name!r}, coords={self.coord_names})"


def as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected coordinate triple(s), got shape {np.shape(points)}")
    return pts


# built-in charts

def _builtin(name, coords, maps, metric, bounds, text) -> Chart:
    syms = coords
    return Chart(
        name=name,
        coord_names=coords,
        maps=tuple(parse(m, syms) for m in maps),
        metric_override=tuple(parse(h, syms) for h in metric),
        domain=Domain(bounds),
        domain_text=text,
        validated=True,
    )


def _make_builtins() -> dict[str, Chart]:
    free = (None, None)
    return {
        "cartesian": _builtin(
            "cartesian", ("q1", "q2", "q3"), ("q1", "q2", "q3"), ("1", "1", "1"),
            (free, free, free), "all of R^3",
        ),
        "spherical": _builtin(
            "spherical",
            ("r", "theta", "psi"),
            ("r*sin(theta)*cos(psi)", "r*sin(theta)*sin(psi)", "r*cos(theta)"),
            ("1", "r", "r*sin(theta)"),
            ((0.0, None), (0.0, math.pi), free),
            "r > 0, 0 < theta < pi (psi unrestricted)",
        ),
        "cylindrical": _builtin(
            "cylindrical",
            ("rho", "phi", "z"),
            ("rho*cos(phi)", "rho*sin(phi)", "z"),
            ("1", "rho", "1"),
            ((0.0, None), free, free),
            "rho > 0 (phi, z unrestricted)",
        ),
    }


_BUILTINS = _make_builtins()
BUILTIN_CHARTS = tuple(_BUILTINS)


def builtin_chart(name: str) -> Chart:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise UnknownChart(f"unknown chart {name!r}; built-in charts: {', '.join(BUILTIN_CHARTS)}") from None


# pointwise geometry

def metric(chart: Chart, p) -> np.ndarray:
    """Metric coefficients at ``p``: shape (3,) for one point, (N, 3) for many."""
    pts = chart.require_domain(p)
    h = _metric_values(chart, pts)
    return h[0] if np.ndim(p) == 1 else h


def _metric_values(chart: Chart, pts: np.ndarray) -> np.ndarray:
    vals = evaluate_many(list(chart.metric), chart.env(pts))
    h = np.stack([np.broadcast_to(v, (len(pts),)) for v in vals], axis=1).astype(float)
    if np.any(h <= METRIC_FLOOR):
        bad = pts[np.argmin(h.min(axis=1))]
        raise DegenerateMetric(f"metric coefficient vanishes at {tuple(bad.tolist())} on chart {chart.name}")
    return h


def _jacobian_values(chart: Chart, pts: np.ndarray) -> np.ndarray:
    flat = [e for row in chart.jacobian for e in row]
    vals = evaluate_many(flat, chart.env(pts))
    jac = np.stack([np.broadcast_to(v, (len(pts),)) for v in vals], axis=1)
    return jac.reshape(len(pts), 3, 3)


@dataclass(frozen=True)
class FramePoint:
    p: tuple[float, float, float]
    h: tuple[float, float, float]
    u: tuple[tuple[float, float, float], ...]  # u[i] is the Cartesian unit vector u_i
    xyz: tuple[float, float, float]


def frame_arrays(chart: Chart, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(h, u, xyz)`` with shapes (N,3), (N,3,3), (N,3); checks orthonormality."""
    pts = chart.require_domain(pts)
    h = _metric_values(chart, pts)
    u = _jacobian_values(chart, pts) / h[:, :, None]
    gram = np.einsum("nik,njk->nij", u, u)
    err = np.abs(gram - np.eye(3)).max(axis=(1, 2))
    if np.any(err > FRAME_TOL):
        bad = pts[np.argmax(err)]
        raise NonOrthogonalChart(
            f"frame of chart {chart.name} is not orthonormal at {tuple(bad.tolist())} "
            f"(deviation {err.max():.3g})"
        )
    env = chart.env(pts)
    xyz = np.stack([np.broadcast_to(v, (len(pts),)) for v in evaluate_many(list(chart.maps), env)], axis=1)
    return h, u, xyz


def frame(chart: Chart, p) -> FramePoint:
    h, u, xyz = frame_arrays(chart, as_points(p)[:1])
    return FramePoint(
        p=tuple(float(v) for v in as_points(p)[0]),
        h=tuple(float(v) for v in h[0]),
        u=tuple(tuple(float(c) for c in row) for row in u[0]),
        xyz=tuple(float(v) for v in xyz[0]),
    )


@dataclass(frozen=True)
class OrthogonalityReport:
    samples: int
    max_offdiag: float
    min_h: float
    passed: bool


def check_orthogonality(chart: Chart, sample_points) -> OrthogonalityReport:
    """Measure how far the chart's tangent vectors are from mutually orthogonal."""
    pts = chart.require_domain(sample_points)
    if len(pts) == 0:
        raise ValueError("need at least one sample point")
    jac = _jacobian_values(chart, pts)
    h = np.linalg.norm(jac, axis=2)
    min_h = float(h.min())
    safe = np.where(h > 0, h, 1.0)
    u = jac / safe[:, :, None]
    gram = np.einsum("nik,njk->nij", u, u)
    off = gram - np.einsum("nii->ni", gram)[:, :, None] * np.eye(3)
    max_off = float(np.abs(off).max())
    return OrthogonalityReport(
        samples=len(pts),
        max_offdiag=max_off,
        min_h=min_h,
        passed=bool(max_off <= ORTHO_TOL and min_h > METRIC_FLOOR),
    )


def validate_chart(chart: Chart, sample_points) -> Chart:
    """Return a copy of ``chart`` marked usable by the operators, or raise."""
    if chart.validated:
        return chart
    report = check_orthogonality(chart, sample_points)
    if not report.passed:
        raise NonOrthogonalChart(
            f"chart {chart.name!r} failed the orthogonality check: max |u_i.u_j| = "
            f"{report.max_offdiag:.3g}, min h = {report.min_h:.3g}"
        )
    return replace(chart, validated=True)


# fields

Pair = tuple[Expr, Expr]


@dataclass(frozen=True, eq=False)
class QuatField:
    """``f = f0 + f1 u1 + f2 u2 + f3 u3`` with complex components as (re, im) pairs."""

    chart: Chart
    f0: Pair
    fv: tuple[Pair, Pair, Pair]

    def __post_init__(self):
        allowed = set(self.chart.coord_names)
        for part in self.real_parts + self.imag_parts:
            if not part.free_symbols <= allowed:
                extra = ", ".join(sorted(part.free_symbols - allowed))
                raise DefinitionError(f"field component references unknown symbol(s) {extra}")

    @property
    def real_parts(self) -> tuple[Expr, Expr, Expr, Expr]:
        return (self.f0[0],) + tuple(c[0] for c in self.fv)

    @property
    def imag_parts(self) -> tuple[Expr, Expr, Expr, Expr]:
        return (self.f0[1],) + tuple(c[1] for c in self.fv)

    @property
    def is_real(self) -> bool:
        return all(p is ZERO for p in self.imag_parts)

    @classmethod
    def from_parts(cls, chart: Chart, re: Sequence[Expr], im: Optional[Sequence[Expr]] = None) -> "QuatField":
        im = tuple(im) if im is not None else (ZERO,) * 4
        return cls(chart, (re[0], im[0]), tuple((re[k], im[k]) for k in (1, 2, 3)))

    @classmethod
    def from_strings(
        cls,
        chart: Chart,
        f0: str = "0",
        f1: str = "0",
        f2: str = "0",
        f3: str = "0",
        *,
        f0i: str = "0",
        f1i: str = "0",
        f2i: str = "0",
        f3i: str = "0",
        params: Optional[Mapping[str, float]] = None,
    ) -> "QuatField":
        re = [component(chart, s, params) for s in (f0, f1, f2, f3)]
        im = [component(chart, s, params) for s in (f0i, f1i, f2i, f3i)]
        return cls.from_parts(chart, re, im)

    def pure_vector(self) -> "QuatField":
        return QuatField(self.chart, (ZERO, ZERO), self.fv)

    def values(self, points) -> np.ndarray:
        """Complex component values, shape (N, 4)."""
        pts = self.chart.require_domain(points)
        env = self.chart.env(pts)
        re = evaluate_many(list(self.real_parts), env)
        im = evaluate_many(list(self.imag_parts), env)
        out = np.empty((len(pts), 4), dtype=complex)
        for k in range(4):
            out[:, k] = np.broadcast_to(re[k], (len(pts),)) + 1j * np.broadcast_to(im[k], (len(pts),))
        return out


def component(chart: Chart, text: Union[str, Expr], params: Optional[Mapping[str, float]] = None) -> Expr:
    """Parse a component expression over ``chart``.

    ``q1, q2, q3`` are accepted as aliases of the chart's coordinate names and
    named parameters are replaced by their values.
    """
    params = dict(params or {})
    clash = set(params) & chart.symbols()
    if clash:
        raise DefinitionError(f"parameter name(s) {', '.join(sorted(clash))} clash with coordinates")
    e = text if isinstance(text, Expr) else parse(text, chart.symbols(params))
    mapping = {alias: Var(name) for alias, name in zip(ALIASES, chart.coord_names) if alias != name}
    mapping.update({k: Const(v) for k, v in params.items()})
    return substitute(e, mapping) if mapping else e


def vector_to_cartesian(chart: Chart, f: QuatField, p) -> Quaternion:
    """``f0 + sum f_i(p) u_i(p)`` written in the Cartesian basis i1, i2, i3."""
    pts = as_points(p)[:1]
    _, u, _ = frame_arrays(chart, pts)
    vals = f.values(pts)[0]
    return Quaternion(vals[0], tuple(np.einsum("i,ik->k", vals[1:], u[0])))


def frame_to_cartesian(chart: Chart, vectors: np.ndarray, points) -> np.ndarray:
    """Vectorized frame change: (N, 3) local-frame components to Cartesian ones."""
    _, u, _ = frame_arrays(chart, as_points(points))
    return np.einsum("ni,nik->nk", vectors, u)


def pull_back_cartesian(chart: Chart, cartesian: Sequence[Expr], cartesian_names=ALIASES) -> tuple[Expr, Expr, Expr]:
    """Local-frame components over ``chart`` of a Cartesian vector field.

    ``cartesian`` gives the i1, i2, i3 components as expressions in
    ``cartesian_names``; the result is ``f_i = u_i . F(x(q))``.
    """
    mapping = dict(zip(cartesian_names, chart.maps))
    comps = [substitute(c, mapping) for c in cartesian]
    return tuple(
        sum((u_ik * c for u_ik, c in zip(row, comps)), ZERO) for row in chart.frame_exprs
    )


# definition files

def _load_schema(name: str) -> dict:
    return json.loads(resources.files("quatcurv.schemas").joinpath(name).read_text())


DEFINITION_SCHEMA = _load_schema("definition.schema.json")

FIELD_KEYS = tuple(f"f{k}_{part}" for k in range(4) for part in ("re", "im"))


@dataclass(frozen=True)
class Definition:
    chart: Chart
    field: Optional[QuatField]
    params: dict
    samples: Optional[np.ndarray] = None


def _bound(value) -> Bound:
    if value is None:
        return None
    if isinstance(value, str):
        from .expr import evaluate

        e = parse(value)
        if not e.is_constant():
            raise DefinitionError(f"domain bound {value!r} must be constant")
        return float(evaluate(e, {}))
    return float(value)


def chart_from_dict(doc: Mapping) -> Chart:
    coords = tuple(doc["coords"])
    try:
        maps = tuple(parse(doc["maps"][k], coords) for k in ("x", "y", "z"))
        metric_override = tuple(parse(h, coords) for h in doc["metric"]) if "metric" in doc else None
        dom = doc.get("domain", {})
        unknown = set(dom) - set(coords)
        if unknown:
            raise DefinitionError(f"domain names unknown coordinate(s) {', '.join(sorted(unknown))}")
        bounds = tuple(
            (_bound(dom[c][0]), _bound(dom[c][1])) if c in dom else (None, None) for c in coords
        )
    except ExprError as exc:
        raise DefinitionError(f"chart {doc.get('name')!r}: {exc}") from exc
    return Chart(
        name=doc["name"],
        coord_names=coords,
        maps=maps,
        metric_override=metric_override,
        domain=Domain(bounds),
        domain_text=Domain(bounds).describe(coords),
    )


def load_definition(source: Union[str, Path, Mapping]) -> Definition:
    """Load a chart/field definition document (path, JSON text or parsed dict).

    A user chart that carries ``samples`` is validated against them here;
    otherwise validation is left to the caller (see validate_chart).
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        path = Path(source)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise DefinitionError(f"{path}: invalid JSON ({exc})") from exc
    try:
        jsonschema.validate(doc, DEFINITION_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DefinitionError(f"definition invalid at {where}: {exc.message}") from None

    spec = doc["chart"]
    chart = builtin_chart(spec) if isinstance(spec, str) else chart_from_dict(spec)
    samples = None
    if isinstance(spec, Mapping) and "samples" in spec:
        samples = as_points(spec["samples"])
        chart = validate_chart(chart, samples)

    params = dict(doc.get("params", {}))
    qf = None
    if "field" in doc:
        fd = doc["field"]
        try:
            re = [component(chart, fd.get(f"f{k}_re", "0"), params) for k in range(4)]
            im = [component(chart, fd.get(f"f{k}_im", "0"), params) for k in range(4)]
        except ExprError as exc:
            raise DefinitionError(f"field: {exc}") from exc
        qf = QuatField.from_parts(chart, re, im)
    return Definition(chart=chart, field=qf, params=params, samples=samples)
