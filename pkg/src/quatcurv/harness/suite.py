"""Identity, golden-form and derivative suites over a field corpus.

Suites never raise on an identity failure: every check becomes an
``IdentityRecord`` and evaluation errors fail the affected record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import QuatCurvError
from ..expr import ZERO, diff, evaluate, parse, substitute
from ..geometry import QuatField, builtin_chart, frame_to_cartesian, pull_back_cartesian
from ..numdiff import richardson_derivative
from ..operators import SYMBOLIC, LameParams, OperatorConfig, Operators
from .corpus import FieldCorpus, generate_corpus
from .golden import GOLDEN_FORMS
from .report import IdentityRecord, VerificationReport

SCALED_TOL = 1e-9
STRICT_TOL = 1e-10
LAME_TOL = 1e-8
FD_SUITE_TOL = 1e-3
CROSS_MODE_TOL = 1e-4
CROSS_MODE_CONFIG = OperatorConfig.fd(1e-3, "richardson")
COVARIANCE_TOL = 1e-8
COVARIANCE_FIELDS = 8
ANCHOR_TOL = 1e-12
ANCHOR_RADII = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    tolerance: float
    description: str
    charts: Optional[tuple[str, ...]] = None  # None means every chart
    excluded: tuple[str, ...] = ()

    def applies(self, chart: str) -> bool:
        if chart in self.excluded:
            return False
        return self.charts is None or chart in self.charts


IDENTITY_REGISTRY: tuple[IdentitySpec, ...] = (
    IdentitySpec("curl_grad_zero", SCALED_TOL, "curl(grad f0) = 0"),
    IdentitySpec("div_curl_zero", SCALED_TOL, "div(curl f) = 0"),
    IdentitySpec("factorization_laplace", SCALED_TOL, "-D(D f) = Delta_H f"),
    IdentitySpec("factorization_bitsadze", SCALED_TOL, "-D(D^r f) = Bitsadze_H f"),
    IdentitySpec("graddiv_mt", SCALED_TOL, "grad div f = -(D D F + D D^r F)/2, vector part"),
    IdentitySpec("graddiv_mt_scalar", STRICT_TOL, "scalar part of (D D F + D D^r F)/2 vanishes"),
    IdentitySpec("laplace_scalar_expanded_vs_composition", SCALED_TOL, "expanded Delta_0 = div grad"),
    IdentitySpec("laplace_vector_expanded_vs_composition", SCALED_TOL, "expanded vector Laplacian = grad div - curl curl"),
    IdentitySpec("bitsadze_vector_expanded_vs_composition", SCALED_TOL, "expanded Bitsadze = grad div + curl curl"),
    IdentitySpec("lame_direct_vs_expanded", LAME_TOL, "Lame direct = expanded curvilinear Lame"),
    IdentitySpec("lame_direct_vs_factorized", LAME_TOL, "Lame direct = -(alpha D D^r + beta D D)"),
    IdentitySpec("lame_factorized_scalar_zero", STRICT_TOL, "scalar part of the factorized Lame operator vanishes"),
    IdentitySpec("matrix_conjugate", STRICT_TOL, "(div f, grad f0 + curl f) = -conj(D f)"),
    IdentitySpec("cartesian_degeneration", STRICT_TOL, "Cartesian vector Laplacian acts componentwise", charts=("cartesian",)),
    IdentitySpec("frame_covariance", COVARIANCE_TOL, "D f agrees with the Cartesian route after frame change", excluded=("cartesian",)),
    IdentitySpec("fd_cross_mode", CROSS_MODE_TOL, "symbolic and finite-difference operators agree"),
)

REGISTRY_BY_ID = {spec.id: spec for spec in IDENTITY_REGISTRY}

# absolute comparisons in symbolic mode; everything else, and every record in
# finite-difference mode, is scaled by (1 + magnitude)
ABSOLUTE = {"fd_cross_mode"}


class _Accumulator:
    """Running maxima of absolute and scaled errors per identity."""

    def __init__(self):
        self.abs: dict[str, float] = {}
        self.scaled: dict[str, float] = {}
        self.samples: dict[str, int] = {}
        self.notes: dict[str, str] = {}

    def add(self, identity: str, got: np.ndarray, want: np.ndarray) -> None:
        got = np.asarray(got)
        want = np.asarray(want)
        err = np.abs(got - want)
        if err.ndim == 1:
            err = err[:, None]
        mag = np.maximum(np.abs(got), np.abs(want))
        if mag.ndim == 1:
            mag = mag[:, None]
        abs_err = err.max(axis=1)
        scaled = abs_err / (1.0 + mag.max(axis=1))
        if not (np.all(np.isfinite(abs_err))):
            abs_err = np.where(np.isfinite(abs_err), abs_err, np.inf)
            scaled = np.where(np.isfinite(scaled), scaled, np.inf)
        self._bump(identity, float(abs_err.max()), float(scaled.max()), len(abs_err))

    def fail(self, identity: str, message: str) -> None:
        self._bump(identity, math.inf, math.inf, 0)
        self.notes.setdefault(identity, message)

    def _bump(self, identity: str, a: float, s: float, n: int) -> None:
        self.abs[identity] = max(self.abs.get(identity, 0.0), a)
        self.scaled[identity] = max(self.scaled.get(identity, 0.0), s)
        self.samples[identity] = self.samples.get(identity, 0) + n

    def record(self, identity: str, chart: str, tolerance: float, kind: str, note: str = "") -> IdentityRecord:
        a = self.abs.get(identity, math.nan)
        s = self.scaled.get(identity, math.nan)
        measured = a if kind == "absolute" else s
        passed = bool(np.isfinite(measured) and measured <= tolerance)
        return IdentityRecord(
            identity=identity,
            chart=chart,
            samples=self.samples.get(identity, 0),
            max_abs_error=a,
            max_error=measured,
            tolerance=tolerance,
            tolerance_kind=kind,
            passed=passed,
            note=self.notes.get(identity, note),
        )


def lame_params_for(seed: int, index: int) -> LameParams:
    """Deterministic valid Lame parameters for corpus entry ``index``."""
    rng = np.random.default_rng([seed, 31337, index])
    mu = float(rng.uniform(0.5, 3.0))
    lam = float(rng.uniform(-(2.0 / 3.0) * mu + 0.1, 3.0))
    return LameParams(mu, lam)


def _conj(v: np.ndarray) -> np.ndarray:
    out = np.array(v, copy=True)
    out[:, 1:] *= -1
    return out


def _checks_for_field(ops: Operators, f: QuatField, params: LameParams, pts: np.ndarray, acc: _Accumulator,
                      chart: str, sign_acc: _Accumulator) -> None:
    q = ops.field(f)
    D, Dr = ops.mt_left, ops.mt_right
    dd = D(D(q))
    ddr = D(Dr(q))
    F = ops.vector_part(q)
    dF, drF = D(D(F)), D(Dr(F))
    built = {
        "curl_grad": ops.curl(ops.grad(q)),
        "div_curl": ops.div(ops.curl(q)),
        "dd": dd,
        "ddr": ddr,
        "lap_h": ops.laplace_quat(q),
        "bits_h": ops.bitsadze_quat(q),
        "gd_mt": (dF + drF).scaled(-0.5),
        "grad_div": ops.grad_div(q),
        "div_grad": ops.div(ops.grad(q)),
        "curl_curl": ops.curl_curl(q),
        "lame_direct": ops.lame_direct(q, params),
        "lame_expanded": ops.lame_expanded(q, params),
        "lame_fact": -(drF.scaled(params.alpha) + dF.scaled(params.beta)),
        "matrix": ops.mt_matrix(q),
        "d": D(q),
    }
    vals = dict(zip(built, ops.evaluate_many(list(built.values()), pts)))
    lap_h, bits_h = vals["lap_h"], vals["bits_h"]
    gd, cc = vals["grad_div"], vals["curl_curl"]

    acc.add("curl_grad_zero", vals["curl_grad"][:, 1:], 0 * vals["curl_grad"][:, 1:])
    acc.add("div_curl_zero", vals["div_curl"][:, 0], 0 * vals["div_curl"][:, 0])
    acc.add("factorization_laplace", -vals["dd"], lap_h)
    acc.add("factorization_bitsadze", -vals["ddr"], bits_h)
    acc.add("graddiv_mt", vals["gd_mt"][:, 1:], gd[:, 1:])
    acc.add("graddiv_mt_scalar", vals["gd_mt"][:, 0], 0 * vals["gd_mt"][:, 0])
    acc.add("laplace_scalar_expanded_vs_composition", lap_h[:, 0], vals["div_grad"][:, 0])
    acc.add("laplace_vector_expanded_vs_composition", lap_h[:, 1:], gd[:, 1:] - cc[:, 1:])
    acc.add("bitsadze_vector_expanded_vs_composition", bits_h[:, 1:], gd[:, 1:] + cc[:, 1:])
    acc.add("lame_direct_vs_expanded", vals["lame_direct"][:, 1:], vals["lame_expanded"][:, 1:])
    acc.add("lame_direct_vs_factorized", vals["lame_fact"][:, 1:], vals["lame_direct"][:, 1:])
    acc.add("lame_factorized_scalar_zero", vals["lame_fact"][:, 0], 0 * vals["lame_fact"][:, 0])
    acc.add("matrix_conjugate", vals["matrix"], -_conj(vals["d"]))

    # the factorization without the leading minus sign, kept out of pass/fail
    sign_acc.add("unsigned_form", -vals["lame_fact"][:, 1:], vals["lame_direct"][:, 1:])
    sign_acc.add("corrected_form", vals["lame_fact"][:, 1:], vals["lame_direct"][:, 1:])

    if chart == "cartesian":
        acc.add("cartesian_degeneration", lap_h[:, 1:], _componentwise_laplacian(ops, f, pts))


def _componentwise_laplacian(ops: Operators, f: QuatField, pts: np.ndarray) -> np.ndarray:
    qs = [ops.from_components([f.fv[k][0], ZERO, ZERO, ZERO], [f.fv[k][1], ZERO, ZERO, ZERO]) for k in range(3)]
    vals = ops.evaluate_many([ops.laplace_scalar(q) for q in qs], pts)
    return np.stack([v[:, 0] for v in vals], axis=1)


def _cross_mode(chart_obj, f: QuatField, params: LameParams, pts: np.ndarray, config: OperatorConfig,
                acc: _Accumulator) -> None:
    results = []
    for cfg in (SYMBOLIC, config):
        ops = Operators(chart_obj, cfg)
        q = ops.field(f)
        built = [ops.mt_left(q), ops.laplace_quat(q), ops.bitsadze_quat(q), ops.lame_direct(q, params)]
        results.append(np.concatenate(ops.evaluate_many(built, pts), axis=1))
    acc.add("fd_cross_mode", results[1], results[0])


def _covariance(corpus: FieldCorpus, pts: np.ndarray, acc: _Accumulator) -> None:
    """Compare D f computed on the corpus chart with the Cartesian computation."""
    chart = builtin_chart(corpus.chart)
    cart = builtin_chart("cartesian")
    cart_corpus = generate_corpus(corpus.seed, COVARIANCE_FIELDS, "cartesian")
    ops = Operators(chart)
    cops = Operators(cart)
    for cf in cart_corpus.fields:
        try:
            mapping = dict(zip(cart.coord_names, chart.maps))
            re0, im0 = (substitute(part, mapping) for part in cf.f0)
            fv_re = pull_back_cartesian(chart, [c[0] for c in cf.fv])
            fv_im = pull_back_cartesian(chart, [c[1] for c in cf.fv])
            f = QuatField.from_parts(chart, [re0, *fv_re], [im0, *fv_im])
            local = ops.evaluate(ops.mt_left(ops.field(f)), pts)
            xyz = np.stack([np.asarray(evaluate(m, chart.env(pts)), dtype=float) * np.ones(len(pts))
                            for m in chart.maps], axis=1)
            ref = cops.evaluate(cops.mt_left(cops.field(cf)), xyz)
            moved = np.concatenate([local[:, :1], frame_to_cartesian(chart, local[:, 1:], pts)], axis=1)
            acc.add("frame_covariance", moved, ref)
        except QuatCurvError as exc:
            acc.fail("frame_covariance", f"{type(exc).__name__}: {exc}")


def _config_fields(config: OperatorConfig) -> dict:
    if config.derivative_mode == "symbolic":
        return {"derivative_mode": "symbolic", "fd_step": None, "fd_scheme": None}
    return {"derivative_mode": config.derivative_mode, "fd_step": config.fd_step, "fd_scheme": config.fd_scheme}


def identity_suite(
    corpus: FieldCorpus,
    config: OperatorConfig = SYMBOLIC,
    points_per_field: int = 20,
    tolerance: Optional[float] = None,
    cross_config: OperatorConfig = CROSS_MODE_CONFIG,
    cross_fields: Optional[int] = None,
) -> VerificationReport:
    """Run every registered identity over ``corpus``; one record per identity.

    ``tolerance`` overrides the registry tolerances.  In finite-difference
    mode the default tolerance relaxes to ``FD_SUITE_TOL`` and the cross-mode
    record compares against ``config`` itself.
    """
    chart_name = corpus.chart
    chart = builtin_chart(chart_name)
    fd_mode = config.derivative_mode != "symbolic"
    cross = config if fd_mode else cross_config
    ops = Operators(chart, config)
    acc = _Accumulator()
    sign_acc = _Accumulator()
    n_cross = len(corpus.fields) if cross_fields is None else min(cross_fields, len(corpus.fields))
    for idx, f in enumerate(corpus.fields):
        pts = corpus.sample_points(points_per_field, salt=idx)
        params = lame_params_for(corpus.seed, idx)
        try:
            _checks_for_field(ops, f, params, pts, acc, chart_name, sign_acc)
        except QuatCurvError as exc:
            for spec in IDENTITY_REGISTRY:
                if spec.applies(chart_name) and spec.id not in ("frame_covariance", "fd_cross_mode"):
                    acc.fail(spec.id, f"field {idx}: {type(exc).__name__}: {exc}")
        if idx < n_cross:
            try:
                _cross_mode(chart, f, params, pts, cross, acc)
            except QuatCurvError as exc:
                acc.fail("fd_cross_mode", f"field {idx}: {type(exc).__name__}: {exc}")
    if REGISTRY_BY_ID["frame_covariance"].applies(chart_name):
        _covariance(corpus, corpus.sample_points(points_per_field, salt=10_000), acc)

    records = []
    for spec in IDENTITY_REGISTRY:
        if not spec.applies(chart_name):
            continue
        tol = spec.tolerance
        if fd_mode:
            tol = FD_SUITE_TOL
        if tolerance is not None:
            tol = tolerance
        kind = "absolute" if spec.id in ABSOLUTE and not fd_mode else "scaled"
        note = ""
        if spec.id == "fd_cross_mode":
            note = f"{cross.fd_scheme} step {cross.fd_step:g} over {n_cross} fields"
        records.append(acc.record(spec.id, chart_name, tol, kind, note))

    unsigned_err = sign_acc.scaled.get("unsigned_form", math.nan)
    fixed_err = sign_acc.scaled.get("corrected_form", math.nan)
    if fixed_err <= LAME_TOL < unsigned_err:
        resolution = "unsigned factorization has the wrong overall sign; L = -(alpha*D*D^r + beta*D^2) confirmed"
    elif unsigned_err <= LAME_TOL:
        resolution = "unsigned factorization confirmed"
    else:
        resolution = "neither sign matches the direct Lame operator"
    diagnostics = {
        "lame_sign": {
            chart_name: {
                "unsigned_form": "alpha*D*D^r + beta*D^2",
                "unsigned_form_max_error": unsigned_err,
                "corrected_form": "-(alpha*D*D^r + beta*D^2)",
                "corrected_form_max_error": fixed_err,
                "resolution": resolution,
            }
        }
    }
    return VerificationReport(
        suite="identity",
        charts=[chart_name],
        corpus_seed=corpus.seed,
        records=records,
        diagnostics=diagnostics,
        **_config_fields(config),
    )


def cross_mode_suite(
    corpus: FieldCorpus,
    config: OperatorConfig = CROSS_MODE_CONFIG,
    points_per_field: int = 20,
    tolerance: float = CROSS_MODE_TOL,
) -> VerificationReport:
    """Only the symbolic vs finite-difference comparison, judged on absolute error."""
    chart = builtin_chart(corpus.chart)
    acc = _Accumulator()
    for idx, f in enumerate(corpus.fields):
        pts = corpus.sample_points(points_per_field, salt=idx)
        try:
            _cross_mode(chart, f, lame_params_for(corpus.seed, idx), pts, config, acc)
        except QuatCurvError as exc:
            acc.fail("fd_cross_mode", f"field {idx}: {type(exc).__name__}: {exc}")
    note = f"{config.fd_scheme} step {config.fd_step:g} over {len(corpus.fields)} fields"
    return VerificationReport(
        suite="cross_mode",
        charts=[corpus.chart],
        corpus_seed=corpus.seed,
        records=[acc.record("fd_cross_mode", corpus.chart, tolerance, "absolute", note)],
        **_config_fields(config),
    )


# golden closed forms

GOLDEN_RECORDS = {
    "mt": "golden_mt",
    "lap0": "golden_laplace_scalar",
    "lapv": "golden_laplace_vector",
    "bitsv": "golden_bitsadze_vector",
}


def _generic(ops: Operators, op: str) -> Callable:
    return {
        "mt": ops.mt_left,
        "lap0": ops.laplace_scalar,
        "lapv": ops.laplace_vector,
        "bitsv": ops.bitsadze_vector,
    }[op]


def golden_suite(
    corpus: FieldCorpus,
    config: OperatorConfig = SYMBOLIC,
    points_per_field: int = 20,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    """Compare the transcribed closed forms with the generic curvilinear routes."""
    chart_name = corpus.chart
    chart = builtin_chart(chart_name)
    ops = Operators(chart, config)
    acc = _Accumulator()
    fd_mode = config.derivative_mode != "symbolic"
    default_tol = FD_SUITE_TOL if fd_mode else SCALED_TOL
    forms = {op: GOLDEN_FORMS[(chart_name, op)] for op in GOLDEN_RECORDS if (chart_name, op) in GOLDEN_FORMS}
    for idx, f in enumerate(corpus.fields):
        pts = corpus.sample_points(points_per_field, salt=idx)
        q = ops.field(f)
        try:
            generic = ops.evaluate_many([_generic(ops, op)(q) for op in forms], pts)
        except QuatCurvError as exc:
            for op in forms:
                acc.fail(GOLDEN_RECORDS[op], f"field {idx}: {type(exc).__name__}: {exc}")
            continue
        for (op, form), vals in zip(forms.items(), generic):
            try:
                acc.add(GOLDEN_RECORDS[op], form.evaluate(f, pts), vals[:, list(form.slots)])
            except QuatCurvError as exc:
                acc.fail(GOLDEN_RECORDS[op], f"field {idx}: {type(exc).__name__}: {exc}")
    records = [
        acc.record(GOLDEN_RECORDS[op], chart_name, tolerance if tolerance is not None else default_tol, "scaled")
        for op in forms
    ]
    if chart_name == "spherical":
        records.extend(_spherical_anchors(ops, tolerance))
    return VerificationReport(
        suite="golden",
        charts=[chart_name],
        corpus_seed=corpus.seed,
        records=records,
        **_config_fields(config),
    )


def golden_spherical_suite(corpus: FieldCorpus, config: OperatorConfig = SYMBOLIC,
                           points_per_field: int = 20, tolerance: Optional[float] = None) -> VerificationReport:
    if corpus.chart != "spherical":
        raise ValueError(f"golden_spherical_suite needs a spherical corpus, got {corpus.chart!r}")
    return golden_suite(corpus, config, points_per_field, tolerance)


def _anchor(identity: str, got, want, tol: float) -> IdentityRecord:
    acc = _Accumulator()
    acc.add(identity, got, want)
    return acc.record(identity, "spherical", tol, "absolute")


def _spherical_anchors(ops: Operators, tolerance: Optional[float]) -> list[IdentityRecord]:
    """Exact values for the radial unit field u1 and for r^2."""
    fd_mode = ops.config.derivative_mode != "symbolic"
    tight = FD_SUITE_TOL if fd_mode else ANCHOR_TOL
    loose = FD_SUITE_TOL if fd_mode else STRICT_TOL
    if tolerance is not None:
        tight = loose = tolerance
    r = np.array(ANCHOR_RADII)
    pts = np.stack([r, np.full_like(r, 1.0), np.full_like(r, 0.5)], axis=1)
    chart = ops.chart
    u1 = ops.field(QuatField.from_strings(chart, f1="1"))
    r2 = ops.field(QuatField.from_strings(chart, f0="r^2"))
    mt, lapv, lap0_f1, lap0_r2 = ops.evaluate_many(
        [ops.mt_left(u1), ops.laplace_vector(u1), ops.laplace_scalar(ops.from_components([parse("1"), ZERO, ZERO, ZERO])),
         ops.laplace_scalar(r2)],
        pts,
    )
    zeros = np.zeros(len(r))
    return [
        _anchor("golden_anchor_mt_radial", mt, np.stack([-2 / r, zeros, zeros, zeros], axis=1), tight),
        _anchor("golden_anchor_laplace_vector_radial", lapv[:, 1:], np.stack([-2 / r**2, zeros, zeros], axis=1), tight),
        _anchor("spherical_coupling", lap0_f1[:, 0] - lapv[:, 1], 2 / r**2, loose),
        _anchor("golden_anchor_laplace_r2", lap0_r2[:, 0], np.full_like(r, 6.0), loose),
    ]


# derivative engine

def derivative_suite(corpus: FieldCorpus, points: int = 100, rel_tol: float = 1e-7,
                     mixed_tol: float = STRICT_TOL) -> VerificationReport:
    """Exact derivatives of every corpus expression against Richardson differences."""
    chart = builtin_chart(corpus.chart)
    names = chart.coord_names
    acc = _Accumulator()
    for idx, f in enumerate(corpus.fields):
        pts = corpus.sample_points(points, salt=20_000 + idx)
        env = chart.env(pts)
        for e in f.real_parts + f.imag_parts:
            if e.is_constant():
                continue
            for i, name in enumerate(names):
                exact = np.asarray(evaluate(diff(e, name), env), dtype=float) * np.ones(len(pts))

                def along(x, i=i):
                    moved = dict(env)
                    moved[names[i]] = x
                    return np.asarray(evaluate(e, moved), dtype=float) * np.ones(len(pts))

                approx, _ = richardson_derivative(along, pts[:, i], h=0.1)
                acc.add("diff_vs_richardson", approx, exact)
                for j in range(i + 1, 3):
                    a = evaluate(diff(diff(e, name), names[j]), env)
                    b = evaluate(diff(diff(e, names[j]), name), env)
                    acc.add("mixed_partials", np.asarray(a) * np.ones(len(pts)), np.asarray(b) * np.ones(len(pts)))
    records = [
        acc.record("diff_vs_richardson", corpus.chart, rel_tol, "scaled"),
        acc.record("mixed_partials", corpus.chart, mixed_tol, "scaled"),
    ]
    return VerificationReport(
        suite="derivatives",
        charts=[corpus.chart],
        corpus_seed=corpus.seed,
        derivative_mode="symbolic",
        records=records,
    )


def full_verification(
    charts,
    seed: int = 42,
    count: int = 50,
    config: OperatorConfig = SYMBOLIC,
    points_per_field: int = 20,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    """Identity suite on every chart plus golden suites where closed forms exist."""
    report: Optional[VerificationReport] = None
    for name in charts:
        corpus = generate_corpus(seed, count, name)
        parts = [identity_suite(corpus, config, points_per_field, tolerance)]
        if any(chart == name for chart, _ in GOLDEN_FORMS):
            parts.append(golden_suite(corpus, config, points_per_field, tolerance))
        for part in parts:
            report = part if report is None else report.merge(part)
    assert report is not None
    report.suite = "verify"
    return report
