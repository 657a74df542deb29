"""Differential operators on quaternion fields over orthogonal charts.

Every operator is written once, against a small "calculus" interface with a
partial derivative ``d(f, i)`` and ordinary arithmetic.  Two calculi exist:

* ``symbolic``: functions are Exprs and ``d`` is exact differentiation, so a
  second-order operator is an exact derivative of an exact derivative.
* ``finite_difference``: functions are numeric callables and ``d`` is a
  central-difference stencil (2nd or 4th order, or Richardson-extrapolated).

Operators map a ``QF`` (four complex components as real/imaginary function
pairs, vector part in the local frame) to a ``QF``.  All coefficients are
real, so each operator acts on the real and imaginary parts independently.

Sign conventions: ``mt_left`` is ``-div + grad + curl`` and ``mt_right`` is
``-div + grad - curl``.  With them ``D D = -Delta_H`` and
``D D^r = -Delta~_H`` hold in any orthogonal chart, and the Lame operator is
``-(alpha D D^r + beta D D)`` (note the overall minus sign).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidLameParams, QuatCurvError
from .expr import Expr, diff, evaluate_many
from .expr.nodes import ZERO
from .geometry import Chart, QuatField, _metric_values
from .quatcore import Quaternion

DERIVATIVE_MODES = ("symbolic", "finite_difference")
FD_SCHEMES = ("central2", "central4", "richardson")


@dataclass(frozen=True)
class OperatorConfig:
    derivative_mode: str = "symbolic"
    fd_step: float = 1e-4
    fd_scheme: str = "central2"

    def __post_init__(self):
        if self.derivative_mode not in DERIVATIVE_MODES:
            raise ValueError(f"derivative_mode must be one of {DERIVATIVE_MODES}")
        if self.fd_scheme not in FD_SCHEMES:
            raise ValueError(f"fd_scheme must be one of {FD_SCHEMES}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")

    @classmethod
    def fd(cls, step: float = 1e-4, scheme: str = "central2") -> "OperatorConfig":
        return cls("finite_difference", step, scheme)


SYMBOLIC = OperatorConfig()


@dataclass(frozen=True)
class LameParams:
    """Lame constants: shear modulus ``mu > 0`` and ``lam > -(2/3) mu``."""

    mu: float
    lam: float

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidLameParams(f"mu must be positive, got {self.mu}")
        if not self.lam > -2.0 / 3.0 * self.mu:
            raise InvalidLameParams(f"lambda must exceed -(2/3)*mu = {-2.0 / 3.0 * self.mu}, got {self.lam}")

    @property
    def alpha(self) -> float:
        return (self.mu + self.lam) / 2.0

    @property
    def beta(self) -> float:
        return (3.0 * self.mu + self.lam) / 2.0

    @property
    def poisson_ratio(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))


# calculi

class SymbolicCalculus:
    def __init__(self, chart: Chart):
        self.chart = chart
        self.zero = ZERO

    def lift(self, e: Expr) -> Expr:
        return e

    def d(self, f: Expr, i: int) -> Expr:
        return diff(f, self.chart.coord_names[i])

    def evaluate(self, fns: Sequence[Expr], pts: np.ndarray) -> list[np.ndarray]:
        vals = evaluate_many(list(fns), self.chart.env(pts))
        return [np.broadcast_to(np.asarray(v, dtype=float), (len(pts),)) for v in vals]


class NumFn:
    """Numeric function of the coordinates, built as a DAG of stencil nodes.

    ``kind`` is one of leaf, const, add, sub, mul, div, neg or stencil.  A
    stencil node is ``sum_k w_k f(p + s_k e_i)`` with integer shifts in units
    of the engine's base step, so offsets compose exactly.
    """

    __slots__ = ("kind", "args", "__weakref__")

    def __init__(self, kind: str, *args):
        self.kind = kind
        self.args = args

    @staticmethod
    def const(c: float) -> "NumFn":
        return NumFn("const", float(c))

    @staticmethod
    def _wrap(x) -> "NumFn":
        return x if isinstance(x, NumFn) else NumFn.const(x)

    def children(self) -> tuple:
        if self.kind in ("leaf", "const"):
            return ()
        if self.kind == "stencil":
            return (self.args[0],)
        return self.args

    def __add__(self, other):
        return NumFn("add", self, NumFn._wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return NumFn("sub", self, NumFn._wrap(other))

    def __rsub__(self, other):
        return NumFn._wrap(other) - self

    def __mul__(self, other):
        return NumFn("mul", self, NumFn._wrap(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return NumFn("div", self, NumFn._wrap(other))

    def __rtruediv__(self, other):
        return NumFn._wrap(other) / self

    def __neg__(self):
        return NumFn("neg", self)


# stencils as (integer shift, weight) pairs; shifts in units of the base step
# and weights to be divided by the base step
_STENCILS = {
    "central2": (1, ((1, 0.5), (-1, -0.5))),
    "central4": (1, ((2, -1 / 12), (1, 8 / 12), (-1, -8 / 12), (-2, 1 / 12))),
    # (4 * central2(h/2) - central2(h)) / 3 with base step h/2
    "richardson": (2, ((1, 2 / 3), (-1, -2 / 3), (2, -1 / 12), (-2, 1 / 12))),
}

_ORIGIN = (0, 0, 0)


def _topo_order(roots) -> list:
    """Nodes reachable from ``roots``, children before parents."""
    order, seen = [], set()
    stack = [(r, False) for r in roots]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((c, False) for c in node.children() if id(c) not in seen)
    return order


class FiniteDifferenceCalculus:
    def __init__(self, chart: Chart, step: float, scheme: str):
        self.chart = chart
        self.step = step
        self.scheme = scheme
        self.units, self._weights = _STENCILS[scheme]
        self.base = step / self.units
        self.zero = NumFn.const(0.0)
        self._lifted: dict[int, tuple[Expr, NumFn]] = {}

    def lift(self, e: Expr) -> NumFn:
        hit = self._lifted.get(id(e))
        if hit is not None:
            return hit[1]
        fn = self.zero if e is ZERO else NumFn("leaf", e)
        self._lifted[id(e)] = (e, fn)  # keep e alive so the id stays unique
        return fn

    def d(self, f: NumFn, i: int) -> NumFn:
        if f is self.zero:
            return self.zero
        return NumFn("stencil", f, i, self._weights)

    def evaluate(self, fns: Sequence[NumFn], pts: np.ndarray) -> list[np.ndarray]:
        order = _topo_order(fns)
        # offsets needed per node, propagated from the roots downward
        need: dict[int, set] = {id(f): {_ORIGIN} for f in fns}
        for node in reversed(order):
            offs = need.get(id(node), set())
            if node.kind == "stencil":
                child, i, weights = node.args
                bucket = need.setdefault(id(child), set())
                for off in offs:
                    for shift, _ in weights:
                        moved = list(off)
                        moved[i] += shift
                        bucket.add(tuple(moved))
            else:
                for child in node.children():
                    need.setdefault(id(child), set()).update(offs)

        n = len(pts)
        values: dict[int, tuple[dict, np.ndarray]] = {}

        def rows(child: NumFn, offs: list) -> np.ndarray:
            index, arr = values[id(child)]
            if arr.ndim == 0:
                return arr
            return arr[[index[o] for o in offs]]

        with np.errstate(all="ignore"):
            for node in order:
                offs = sorted(need[id(node)])
                index = {o: k for k, o in enumerate(offs)}
                kind = node.kind
                if kind == "const":
                    arr = np.asarray(node.args[0])
                elif kind == "leaf":
                    shifted = np.concatenate([pts + self.base * np.asarray(o, dtype=float) for o in offs])
                    v = evaluate_many([node.args[0]], self.chart.env(shifted))[0]
                    arr = np.broadcast_to(np.asarray(v, dtype=float), (len(shifted),)).reshape(len(offs), n)
                elif kind == "stencil":
                    child, i, weights = node.args
                    arr = 0.0
                    for shift, w in weights:
                        moved = []
                        for o in offs:
                            m = list(o)
                            m[i] += shift
                            moved.append(tuple(m))
                        arr = arr + (w / self.base) * rows(child, moved)
                elif kind == "neg":
                    arr = -rows(node.args[0], offs)
                else:
                    a, b = rows(node.args[0], offs), rows(node.args[1], offs)
                    arr = {"add": np.add, "sub": np.subtract, "mul": np.multiply, "div": np.divide}[kind](a, b)
                values[id(node)] = (index, np.asarray(arr, dtype=float))
            out = [np.broadcast_to(rows(f, [_ORIGIN]), (1, n))[0] for f in fns]
        for v in out:
            if not np.all(np.isfinite(v)):
                from .errors import DomainError

                raise DomainError("finite-difference evaluation produced a non-finite value")
        return out


def make_calculus(chart: Chart, config: OperatorConfig):
    if config.derivative_mode == "symbolic":
        return SymbolicCalculus(chart)
    return FiniteDifferenceCalculus(chart, config.fd_step, config.fd_scheme)


# quaternion of functions

@dataclass(frozen=True, eq=False)
class QF:
    """Four complex components ``(scalar, u1, u2, u3)`` as real/imag function tuples."""

    re: tuple
    im: tuple

    def __add__(self, other: "QF") -> "QF":
        return QF(tuple(a + b for a, b in zip(self.re, other.re)), tuple(a + b for a, b in zip(self.im, other.im)))

    def __sub__(self, other: "QF") -> "QF":
        return QF(tuple(a - b for a, b in zip(self.re, other.re)), tuple(a - b for a, b in zip(self.im, other.im)))

    def __neg__(self) -> "QF":
        return QF(tuple(-a for a in self.re), tuple(-a for a in self.im))

    def scaled(self, c: float) -> "QF":
        return QF(tuple(c * a for a in self.re), tuple(c * a for a in self.im))


class NotValidated(QuatCurvError, ValueError):
    """The chart has not passed an orthogonality check (see geometry.validate_chart)."""


# vector-calculus building blocks on real component tuples

def _scale(x, h, exps):
    """Multiply ``x`` by prod h_k^exps[k] with exps in {-1, 0, 1}."""
    for k, e in enumerate(exps):
        if e == 1:
            x = x * h[k]
    for k, e in enumerate(exps):
        if e == -1:
            x = x / h[k]
    return x


# Expanded second-order vector operators: row i lists the terms of the u_i
# component as (group, sign, A, a, B, b, C, c) meaning
#     sign * A * d_a[ B * d_b( C * f_c ) ]
# with A, B, C products of metric coefficients given as exponent triples.
# "gd" terms make up grad(div f); "cc" terms make up -curl(curl f).
_H = (-1, -1, -1)
_EXPANDED_TERMS = (
    (
        ("gd", +1, (-1, 0, 0), 0, _H, 0, (0, 1, 1), 0),
        ("gd", +1, (-1, 0, 0), 0, _H, 1, (1, 0, 1), 1),
        ("gd", +1, (-1, 0, 0), 0, _H, 2, (1, 1, 0), 2),
        ("cc", -1, (0, -1, -1), 1, (-1, -1, 1), 0, (0, 1, 0), 1),
        ("cc", +1, (0, -1, -1), 1, (-1, -1, 1), 1, (1, 0, 0), 0),
        ("cc", +1, (0, -1, -1), 2, (-1, 1, -1), 2, (1, 0, 0), 0),
        ("cc", -1, (0, -1, -1), 2, (-1, 1, -1), 0, (0, 0, 1), 2),
    ),
    (
        ("gd", +1, (0, -1, 0), 1, _H, 0, (0, 1, 1), 0),
        ("gd", +1, (0, -1, 0), 1, _H, 1, (1, 0, 1), 1),
        ("gd", +1, (0, -1, 0), 1, _H, 2, (1, 1, 0), 2),
        ("cc", -1, (-1, 0, -1), 2, (1, -1, -1), 1, (0, 0, 1), 2),
        ("cc", +1, (-1, 0, -1), 2, (1, -1, -1), 2, (0, 1, 0), 1),
        ("cc", +1, (-1, 0, -1), 0, (-1, -1, 1), 0, (0, 1, 0), 1),
        ("cc", -1, (-1, 0, -1), 0, (-1, -1, 1), 1, (1, 0, 0), 0),
    ),
    (
        ("gd", +1, (0, 0, -1), 2, _H, 0, (0, 1, 1), 0),
        ("gd", +1, (0, 0, -1), 2, _H, 1, (1, 0, 1), 1),
        ("gd", +1, (0, 0, -1), 2, _H, 2, (1, 1, 0), 2),
        ("cc", -1, (-1, -1, 0), 0, (-1, 1, -1), 2, (1, 0, 0), 0),
        ("cc", +1, (-1, -1, 0), 0, (-1, 1, -1), 0, (0, 0, 1), 2),
        ("cc", +1, (-1, -1, 0), 1, (1, -1, -1), 1, (0, 0, 1), 2),
        ("cc", -1, (-1, -1, 0), 1, (1, -1, -1), 2, (0, 1, 0), 1),
    ),
)


class Operators:
    """All operators for one chart and derivative configuration."""

    def __init__(self, chart: Chart, config: Optional[OperatorConfig] = None):
        if not chart.validated:
            raise NotValidated(f"chart {chart.name!r} must pass validate_chart() before use")
        self.chart = chart
        self.config = config or SYMBOLIC
        self.calc = make_calculus(chart, self.config)
        self.h = tuple(self.calc.lift(e) for e in chart.metric)

    # construction / evaluation

    def field(self, f: QuatField) -> QF:
        if f.chart is not self.chart and f.chart.coord_names != self.chart.coord_names:
            raise ValueError("field belongs to a different chart")
        lift = self.calc.lift
        return QF(tuple(lift(e) for e in f.real_parts), tuple(lift(e) for e in f.imag_parts))

    def from_components(self, re: Sequence[Expr], im: Optional[Sequence[Expr]] = None) -> QF:
        im = im if im is not None else (ZERO,) * 4
        return QF(tuple(self.calc.lift(e) for e in re), tuple(self.calc.lift(e) for e in im))

    def evaluate(self, q: QF, points) -> np.ndarray:
        """Complex values of ``q`` at ``points``, shape (N, 4)."""
        pts = self.chart.require_domain(points)
        _metric_values(self.chart, pts)  # DegenerateMetric check
        vals = self.calc.evaluate(list(q.re) + list(q.im), pts)
        out = np.empty((len(pts), 4), dtype=complex)
        for k in range(4):
            out[:, k] = vals[k] + 1j * vals[4 + k]
        return out

    def evaluate_many(self, qs: Sequence[QF], points) -> list[np.ndarray]:
        """Like evaluate, for several QFs sharing one pass over the points."""
        pts = self.chart.require_domain(points)
        _metric_values(self.chart, pts)
        flat = [fn for q in qs for fn in (*q.re, *q.im)]
        vals = self.calc.evaluate(flat, pts)
        out = []
        for j in range(len(qs)):
            v = vals[8 * j: 8 * j + 8]
            arr = np.empty((len(pts), 4), dtype=complex)
            for k in range(4):
                arr[:, k] = v[k] + 1j * v[4 + k]
            out.append(arr)
        return out

    def _apply(self, real_op, q: QF) -> QF:
        return QF(real_op(q.re), real_op(q.im))

    # real building blocks: 4-tuples (s, v1, v2, v3) -> 4-tuples

    def _grad(self, f0):
        d, h = self.calc.d, self.h
        return tuple(d(f0, i) / h[i] for i in range(3))

    def _div(self, f):
        d = self.calc.d
        h1, h2, h3 = self.h
        f1, f2, f3 = f
        return (d(h2 * h3 * f1, 0) + d(h1 * h3 * f2, 1) + d(h1 * h2 * f3, 2)) / (h1 * h2 * h3)

    def _curl(self, f):
        d = self.calc.d
        h1, h2, h3 = self.h
        f1, f2, f3 = f
        return (
            (d(h3 * f3, 1) - d(h2 * f2, 2)) / (h2 * h3),
            (d(h1 * f1, 2) - d(h3 * f3, 0)) / (h1 * h3),
            (d(h2 * f2, 0) - d(h1 * f1, 1)) / (h1 * h2),
        )

    def _laplace_scalar_expanded(self, f0):
        d = self.calc.d
        h1, h2, h3 = self.h
        return (
            d(h2 * h3 / h1 * d(f0, 0), 0)
            + d(h1 * h3 / h2 * d(f0, 1), 1)
            + d(h1 * h2 / h3 * d(f0, 2), 2)
        ) / (h1 * h2 * h3)

    def _expanded_vector(self, f, gd_weight: float, cc_weight: float):
        """``gd_weight * grad div f + cc_weight * (-curl curl f)`` from the term table."""
        d, h = self.calc.d, self.h
        out = []
        for row in _EXPANDED_TERMS:
            total = self.calc.zero
            for group, sign, A, a, B, b, C, c in row:
                weight = gd_weight if group == "gd" else cc_weight
                if weight == 0:
                    continue
                inner = d(_scale(f[c], h, C), b)
                term = _scale(d(_scale(inner, h, B), a), h, A)
                total = total + (sign * weight) * term
            out.append(total)
        return tuple(out)

    # first-order operators

    def grad(self, q: QF) -> QF:
        """grad of the scalar part, as a pure vector."""
        z = self.calc.zero
        return self._apply(lambda c: (z, *self._grad(c[0])), q)

    def div(self, q: QF) -> QF:
        """div of the vector part, as a scalar."""
        z = self.calc.zero
        return self._apply(lambda c: (self._div(c[1:]), z, z, z), q)

    def curl(self, q: QF) -> QF:
        z = self.calc.zero
        return self._apply(lambda c: (z, *self._curl(c[1:])), q)

    def mt_left(self, q: QF) -> QF:
        def op(c):
            g, r = self._grad(c[0]), self._curl(c[1:])
            return (-self._div(c[1:]), *(a + b for a, b in zip(g, r)))

        return self._apply(op, q)

    def mt_right(self, q: QF) -> QF:
        def op(c):
            g, r = self._grad(c[0]), self._curl(c[1:])
            return (-self._div(c[1:]), *(a - b for a, b in zip(g, r)))

        return self._apply(op, q)

    def mt_matrix(self, q: QF) -> QF:
        """Matrix form: ``(div f, grad f0 + curl f)`` packed as a quaternion."""
        def op(c):
            g, r = self._grad(c[0]), self._curl(c[1:])
            return (self._div(c[1:]), *(a + b for a, b in zip(g, r)))

        return self._apply(op, q)

    # second-order operators

    def laplace_scalar(self, q: QF) -> QF:
        z = self.calc.zero
        return self._apply(lambda c: (self._laplace_scalar_expanded(c[0]), z, z, z), q)

    def laplace_vector(self, q: QF) -> QF:
        z = self.calc.zero
        return self._apply(lambda c: (z, *self._expanded_vector(c[1:], 1.0, 1.0)), q)

    def bitsadze_vector(self, q: QF) -> QF:
        z = self.calc.zero
        return self._apply(lambda c: (z, *self._expanded_vector(c[1:], 1.0, -1.0)), q)

    def laplace_quat(self, q: QF) -> QF:
        return self._apply(
            lambda c: (self._laplace_scalar_expanded(c[0]), *self._expanded_vector(c[1:], 1.0, 1.0)), q
        )

    def bitsadze_quat(self, q: QF) -> QF:
        return self._apply(
            lambda c: (self._laplace_scalar_expanded(c[0]), *self._expanded_vector(c[1:], 1.0, -1.0)), q
        )

    def grad_div(self, q: QF) -> QF:
        """grad(div f) by composing the first-order operators."""
        return self.grad(self.div(q))

    def curl_curl(self, q: QF) -> QF:
        return self.curl(self.curl(q))

    def lame_direct(self, q: QF, params: LameParams) -> QF:
        """``mu * Delta f + (mu + lambda) grad div f``."""
        return self.laplace_vector(q).scaled(params.mu) + self.grad_div(q).scaled(params.mu + params.lam)

    def lame_expanded(self, q: QF, params: LameParams) -> QF:
        """Lame operator from the expanded curvilinear formula (weights 2mu+lambda and mu)."""
        z = self.calc.zero
        gd, cc = 2 * params.mu + params.lam, params.mu
        return self._apply(lambda c: (z, *self._expanded_vector(c[1:], gd, cc)), q)

    def vector_part(self, q: QF) -> QF:
        z = self.calc.zero
        return QF((z, *q.re[1:]), (z, *q.im[1:]))

    def lame_factorized(self, q: QF, params: LameParams) -> QF:
        """``-(alpha D D^r F + beta D D F)`` for the pure-vector part F of ``q``."""
        F = self.vector_part(q)
        dd_r = self.mt_left(self.mt_right(F))
        dd = self.mt_left(self.mt_left(F))
        return -(dd_r.scaled(params.alpha) + dd.scaled(params.beta))

    def lame_factorized_unsigned(self, q: QF, params: LameParams) -> QF:
        """``alpha D D^r F + beta D D F`` without the corrective minus sign."""
        return -self.lame_factorized(q, params)

    def graddiv_via_mt(self, q: QF) -> QF:
        """``-(D D F + D D^r F) / 2`` for the pure-vector part F of ``q``."""
        F = self.vector_part(q)
        return (self.mt_left(self.mt_left(F)) + self.mt_left(self.mt_right(F))).scaled(-0.5)


# pointwise API

def _single(points) -> bool:
    return np.ndim(points) == 1


def _ops(chart: Chart, config: Optional[OperatorConfig]) -> Operators:
    return Operators(chart, config)


def _pair_field(chart: Chart, f0=None, fv=None) -> QuatField:
    f0 = f0 if f0 is not None else (ZERO, ZERO)
    fv = fv if fv is not None else ((ZERO, ZERO),) * 3
    return QuatField(chart, _as_pair(f0), tuple(_as_pair(c) for c in fv))


def _as_pair(c):
    if isinstance(c, Expr):
        return (c, ZERO)
    return (c[0], c[1])


def _run(chart, f: QuatField, p, config, build) -> np.ndarray:
    ops = _ops(chart, config)
    vals = ops.evaluate(build(ops, ops.field(f)), p)
    return vals[0] if _single(p) else vals


def _as_quaternion(vals):
    if vals.ndim == 1:
        return Quaternion(vals[0], tuple(vals[1:]))
    return vals


def grad_s(chart: Chart, f0, p, config: Optional[OperatorConfig] = None):
    """Frame components ``(1/h_i) d f0/d q_i``."""
    vals = _run(chart, _pair_field(chart, f0=f0), p, config, lambda o, q: o.grad(q))
    return vals[..., 1:]


def div_v(chart: Chart, fv, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.div(q))
    return vals[..., 0]


def curl_v(chart: Chart, fv, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.curl(q))
    return vals[..., 1:]


def mt_left(chart: Chart, f: QuatField, p, config: Optional[OperatorConfig] = None):
    return _as_quaternion(_run(chart, f, p, config, lambda o, q: o.mt_left(q)))


def mt_right(chart: Chart, f: QuatField, p, config: Optional[OperatorConfig] = None):
    return _as_quaternion(_run(chart, f, p, config, lambda o, q: o.mt_right(q)))


def mt_matrix_apply(chart: Chart, f: QuatField, p, config: Optional[OperatorConfig] = None):
    """``(div f, grad f0 + curl f)`` as a (complex scalar, frame vector) pair."""
    vals = _run(chart, f, p, config, lambda o, q: o.mt_matrix(q))
    return vals[..., 0], vals[..., 1:]


def laplace_scalar(chart: Chart, f0, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, f0=f0), p, config, lambda o, q: o.laplace_scalar(q))
    return vals[..., 0]


def laplace_vector(chart: Chart, fv, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.laplace_vector(q))
    return vals[..., 1:]


def laplace_quat(chart: Chart, f: QuatField, p, config: Optional[OperatorConfig] = None):
    return _as_quaternion(_run(chart, f, p, config, lambda o, q: o.laplace_quat(q)))


def bitsadze_vector(chart: Chart, fv, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.bitsadze_vector(q))
    return vals[..., 1:]


def bitsadze_quat(chart: Chart, f: QuatField, p, config: Optional[OperatorConfig] = None):
    return _as_quaternion(_run(chart, f, p, config, lambda o, q: o.bitsadze_quat(q)))


def lame_direct(chart: Chart, fv, params: LameParams, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.lame_direct(q, params))
    return vals[..., 1:]


def lame_expanded(chart: Chart, fv, params: LameParams, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.lame_expanded(q, params))
    return vals[..., 1:]


def lame_factorized(chart: Chart, fv, params: LameParams, p, config: Optional[OperatorConfig] = None):
    """Frame vector of ``-(alpha D D^r F + beta D D F)``.

    The scalar part, which vanishes identically, is available from
    ``Operators.lame_factorized``.
    """
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.lame_factorized(q, params))
    return vals[..., 1:]


def graddiv_via_mt(chart: Chart, fv, p, config: Optional[OperatorConfig] = None):
    vals = _run(chart, _pair_field(chart, fv=fv), p, config, lambda o, q: o.graddiv_via_mt(q))
    return vals[..., 1:]
