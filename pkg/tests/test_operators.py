from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from quatcurv.errors import InvalidLameParams, OutOfDomain
from quatcurv.expr import parse
from quatcurv.geometry import QuatField, builtin_chart, chart_from_dict, component
from quatcurv.operators import (
    LameParams,
    NotValidated,
    OperatorConfig,
    Operators,
    bitsadze_quat,
    bitsadze_vector,
    curl_v,
    div_v,
    grad_s,
    graddiv_via_mt,
    lame_direct,
    lame_expanded,
    lame_factorized,
    laplace_quat,
    laplace_scalar,
    laplace_vector,
    mt_left,
    mt_matrix_apply,
    mt_right,
)
from quatcurv.quatcore import Quaternion, qconj

CART = builtin_chart("cartesian")
SPH = builtin_chart("spherical")
CYL = builtin_chart("cylindrical")
SPH_POINTS = np.array([[0.7, 0.4, 0.1], [2.0, math.pi / 3, 1.0], [2.8, 2.5, 5.9]])


def c(chart, text):
    return component(chart, text)


def vec(chart, *texts):
    return [c(chart, t) for t in texts]


def assert_close(got, want, tol=1e-12):
    got, want = np.asarray(got, dtype=complex), np.asarray(want, dtype=complex)
    assert np.abs(got - want).max() <= tol * (1 + np.abs(want).max()), (got, want)


# configuration


def test_config_validation():
    with pytest.raises(ValueError):
        OperatorConfig.fd(0.0)
    with pytest.raises(ValueError):
        OperatorConfig.fd(1e-3, "central3")
    with pytest.raises(ValueError):
        OperatorConfig("spectral")
    assert OperatorConfig().derivative_mode == "symbolic"


@pytest.mark.parametrize("mu, lam", [(0, 1), (-1, 0), (1, -2 / 3), (3, -2.5)])
def test_lame_params_rejected(mu, lam):
    with pytest.raises(InvalidLameParams):
        LameParams(mu, lam)


def test_lame_params_derived():
    p = LameParams(2, 1)
    assert (p.alpha, p.beta) == (1.5, 3.5)
    assert p.poisson_ratio == pytest.approx(1 / 6)


def test_unvalidated_user_chart_refused():
    chart = chart_from_dict({"name": "u", "coords": ["a", "b", "c"], "maps": {"x": "a", "y": "b", "z": "c"}})
    with pytest.raises(NotValidated):
        Operators(chart)


# first-order operators


def test_grad_examples():
    assert_close(grad_s(CART, c(CART, "q1^2"), (3, 0, 0)), [6, 0, 0])
    assert_close(grad_s(SPH, c(SPH, "r"), SPH_POINTS), np.tile([1, 0, 0], (3, 1)))
    assert_close(grad_s(SPH, c(SPH, "theta"), (2, math.pi / 4, 0)), [0, 0.5, 0])


def test_div_examples():
    assert_close(div_v(CART, vec(CART, "q1", "q2", "q3"), [(1, 2, 3), (-1, 0, 5)]), [3, 3])
    assert_close(div_v(SPH, vec(SPH, "1", "0", "0"), SPH_POINTS), 2 / SPH_POINTS[:, 0])
    assert_close(div_v(SPH, vec(SPH, "0", "0", "1"), SPH_POINTS), [0, 0, 0])


def test_curl_examples():
    assert_close(curl_v(CART, vec(CART, "-q2", "q1", "0"), (0.5, 1, 2)), [0, 0, 2])
    r = SPH_POINTS[:, 0]
    assert_close(curl_v(SPH, vec(SPH, "0", "1", "0"), SPH_POINTS), np.column_stack([0 * r, 0 * r, 1 / r]))


@pytest.mark.parametrize("chart", [CART, SPH, CYL], ids=lambda ch: ch.name)
def test_curl_of_grad_vanishes(chart):
    f0 = c(chart, "q1^2*sin(q2) + q3*q1")
    ops = Operators(chart)
    g = ops.grad(ops.from_components([f0, parse("0"), parse("0"), parse("0")]))
    pts = np.array([[1.2, 0.8, 0.3], [2.0, 1.4, 1.1]])
    assert_close(ops.evaluate(ops.curl(g), pts), np.zeros((2, 4)), 1e-12)


def test_mt_left_examples():
    q = mt_left(CART, QuatField.from_strings(CART, f1="q1", f2="q2", f3="q3"), (0.2, 0.5, 1))
    assert_close(q.components, [-3, 0, 0, 0])
    q = mt_left(SPH, QuatField.from_strings(SPH, f1="1"), (2, 1, 1))
    assert_close(q.components, [-1, 0, 0, 0])
    q = mt_left(CART, QuatField.from_strings(CART, f1="q1", f2="-q2"), (0.2, 0.5, 1))
    assert_close(q.components, [0, 0, 0, 0])


def test_mt_right_examples():
    q = mt_right(CART, QuatField.from_strings(CART, f1="-q2", f2="q1"), (1, 2, 3))
    assert_close(q.components, [0, 0, 0, -2])
    grad_field = QuatField.from_strings(CART, f1="2*q1*q2", f2="q1^2", f3="0")
    p = (0.4, -1, 2)
    assert_close(mt_right(CART, grad_field, p).components, mt_left(CART, grad_field, p).components)
    q = mt_right(SPH, QuatField.from_strings(SPH, f1="1"), (4, 1, 1))
    assert_close(q.components, [-0.5, 0, 0, 0])


def test_mt_matrix_examples():
    s, v = mt_matrix_apply(CART, QuatField.from_strings(CART, f1="q1"), (1, 2, 3))
    assert_close(s, 1)
    assert_close(v, [0, 0, 0])
    s, v = mt_matrix_apply(SPH, QuatField.from_strings(SPH, f0="r^2*cos(theta)"), (2, 0.5, 1))
    assert_close(s, 0)
    assert_close(v, grad_s(SPH, c(SPH, "r^2*cos(theta)"), (2, 0.5, 1)))


def test_mt_matrix_is_negative_conjugate():
    f = QuatField.from_strings(CART, f0="q1*q2^2", f1="q3^3 - q1", f2="q1*q2*q3", f3="q2^2", f1i="q3*q1")
    pts = np.array([[0.3, -1, 2], [1.5, 0.2, -0.7]])
    s, v = mt_matrix_apply(CART, f, pts)
    left = mt_left(CART, f, pts)
    for k in range(2):
        conj = qconj(Quaternion(left[k, 0], tuple(left[k, 1:])))
        assert_close(np.concatenate([[s[k]], v[k]]) + np.array(conj.components), np.zeros(4), 1e-10)


# second-order operators


def test_laplace_scalar_examples():
    assert_close(laplace_scalar(CART, c(CART, "q1^2 - q2^2"), (1, 2, 3)), 0)
    assert_close(laplace_scalar(SPH, c(SPH, "1/r"), SPH_POINTS), [0, 0, 0])
    assert_close(laplace_scalar(SPH, c(SPH, "r^2"), SPH_POINTS), [6, 6, 6])


def test_laplace_vector_examples():
    assert_close(laplace_vector(CART, vec(CART, "q1^2", "0", "0"), (1, 2, 3)), [2, 0, 0])
    r = SPH_POINTS[:, 0]
    assert_close(laplace_vector(SPH, vec(SPH, "1", "0", "0"), SPH_POINTS), np.column_stack([-2 / r**2, 0 * r, 0 * r]))
    assert_close(laplace_vector(CART, vec(CART, "q2^2", "0", "0"), (1, 2, 3)), [2, 0, 0])


def test_laplace_quat_examples():
    assert_close(laplace_quat(CART, QuatField.from_strings(CART, f0="q1^2 - q2^2"), (1, 2, 3)).components, [0] * 4)
    q = laplace_quat(SPH, QuatField.from_strings(SPH, f1="1"), (2, 1, 1))
    assert_close(q.components, [0, -0.5, 0, 0])


def test_bitsadze_examples():
    assert_close(bitsadze_vector(CART, vec(CART, "q1^2", "0", "0"), (1, 2, 3)), [2, 0, 0])
    assert_close(bitsadze_vector(CART, vec(CART, "q2^2", "0", "0"), (1, 2, 3)), [-2, 0, 0])
    q = bitsadze_quat(SPH, QuatField.from_strings(SPH, f1="1"), (2, 1, 1))
    assert_close(q.components, [0, -0.5, 0, 0])
    q = bitsadze_quat(SPH, QuatField.from_strings(SPH, f0="r^2"), (2, 1, 1))
    assert_close(q.components, [6, 0, 0, 0])


@pytest.mark.parametrize("chart", [CART, SPH, CYL], ids=lambda ch: ch.name)
def test_bitsadze_on_gradient_field(chart):
    f0 = "q1^3*cos(q2) + q3^2"
    ops = Operators(chart)
    g = ops.grad(ops.from_components([c(chart, f0), parse("0"), parse("0"), parse("0")]))
    pts = np.array([[1.1, 0.9, 0.4], [2.3, 2.0, 1.7]])
    b, lv = ops.evaluate_many([ops.bitsadze_vector(g), ops.laplace_vector(g)], pts)
    ref = ops.evaluate(ops.grad(ops.laplace_scalar(ops.from_components([c(chart, f0)] + [parse("0")] * 3))), pts)
    assert_close(b, ref, 1e-11)
    assert_close(lv, ref, 1e-11)


def test_lame_examples():
    assert_close(lame_direct(CART, vec(CART, "q1", "q2", "q3"), LameParams(1.7, 0.3), (1, 2, 3)), [0, 0, 0])
    assert_close(lame_direct(CART, vec(CART, "q1^2", "0", "0"), LameParams(1, 1), (1, 2, 3)), [6, 0, 0])
    r = SPH_POINTS[:, 0]
    want = np.column_stack([-4 / r**2, 0 * r, 0 * r])
    fv = vec(SPH, "1", "0", "0")
    assert_close(lame_direct(SPH, fv, LameParams(1, 0), SPH_POINTS), want)
    assert_close(lame_expanded(SPH, fv, LameParams(1, 0), SPH_POINTS), want)
    assert_close(lame_factorized(SPH, fv, LameParams(1, 0), SPH_POINTS), want)


def test_lame_factorized_examples():
    assert_close(lame_factorized(CART, vec(CART, "q1^2", "0", "0"), LameParams(1, 1), (1, 2, 3)), [6, 0, 0])
    harmonic_grad = vec(CART, "2*q1", "-2*q2", "0")  # grad(q1^2 - q2^2)
    for mu, lam in [(1, 0), (2.5, -1), (0.3, 4)]:
        assert_close(lame_factorized(CART, harmonic_grad, LameParams(mu, lam), (0.5, 1, -2)), [0, 0, 0])


def test_lame_factorized_scalar_part_vanishes(corpora):
    corpus = corpora["spherical"]
    ops = Operators(SPH)
    pts = corpus.sample_points(5, 0)
    worst = 0.0
    for k, f in enumerate(corpus.fields[:20]):
        q = ops.field(f)
        vals = ops.evaluate(ops.lame_factorized(q, LameParams(1.0 + 0.1 * k, 0.5)), pts)
        worst = max(worst, np.abs(vals[:, 0]).max() / (1 + np.abs(vals).max()))
    assert worst <= 1e-10


def test_lame_unsigned_form_disagrees():
    ops = Operators(CART)
    q = ops.field(QuatField.from_strings(CART, f1="q1^2"))
    p = LameParams(1, 1)
    direct, unsigned = ops.evaluate_many([ops.lame_direct(q, p), ops.lame_factorized_unsigned(q, p)], [(1, 2, 3)])
    assert_close(unsigned, -direct)


def test_graddiv_examples():
    assert_close(graddiv_via_mt(CART, vec(CART, "q1^2", "0", "0"), (1, 2, 3)), [2, 0, 0])
    assert_close(graddiv_via_mt(CART, vec(CART, "-q2", "q1", "0"), (1, 2, 3)), [0, 0, 0])
    r = SPH_POINTS[:, 0]
    assert_close(graddiv_via_mt(SPH, vec(SPH, "1", "0", "0"), SPH_POINTS), np.column_stack([-2 / r**2, 0 * r, 0 * r]))


@pytest.mark.parametrize("chart", [CART, SPH, CYL], ids=lambda ch: ch.name)
def test_factorizations_on_complex_field(chart):
    f = QuatField.from_strings(
        chart, f0="q1^2*sin(q2)", f1="q1*cos(q3)", f2="sin(q2)*q1^3", f3="cos(q2)*q3", f1i="q1^2", f3i="exp(q3/3)"
    )
    ops = Operators(chart)
    q = ops.field(f)
    pts = np.array([[1.3, 0.7, 2.0], [2.5, 2.0, 1.0]])
    d2, lh, ddr, bh = ops.evaluate_many(
        [ops.mt_left(ops.mt_left(q)), ops.laplace_quat(q), ops.mt_left(ops.mt_right(q)), ops.bitsadze_quat(q)], pts
    )
    assert_close(d2, -lh, 1e-9)
    assert_close(ddr, -bh, 1e-9)


# domain handling


def test_out_of_domain_refused():
    with pytest.raises(OutOfDomain):
        mt_left(SPH, QuatField.from_strings(SPH, f1="1"), (1, 0, 0))
    with pytest.raises(OutOfDomain):
        laplace_scalar(CYL, c(CYL, "rho"), (0, 1, 1))


def test_finite_difference_mode_close_to_symbolic():
    f = QuatField.from_strings(SPH, f0="r^2*sin(theta)", f1="r*cos(psi)", f2="sin(theta)*r^3", f1i="r^2")
    p = (1.5, 1.0, 0.5)
    sym = laplace_quat(SPH, f, p).components
    for scheme, tol in [("central2", 1e-5), ("central4", 1e-7), ("richardson", 1e-7)]:
        fd = laplace_quat(SPH, f, p, OperatorConfig.fd(1e-3, scheme)).components
        assert_close(fd, sym, tol)


# independent oracle

OPS = {
    "grad": "grad",
    "div": "div",
    "curl": "curl",
    "mt": "mt_left",
    "mtr": "mt_right",
    "lap0": "laplace_scalar",
    "lapv": "laplace_vector",
    "bitsv": "bitsadze_vector",
    "graddiv": "grad_div",
}


def _oracle_cases():
    doc = json.loads((Path(__file__).parent / "fixtures" / "oracle.json").read_text())
    return doc["lame"], [(case, op) for case in doc["cases"] for op in case["values"][0]]


LAME, ORACLE = _oracle_cases()


@pytest.mark.parametrize("case, op", ORACLE, ids=[f"{c['chart']}-{c['name']}-{op}" for c, op in ORACLE])
def test_against_cartesian_route_oracle(case, op):
    chart = builtin_chart(case["chart"])
    ops = Operators(chart)
    q = ops.field(QuatField.from_strings(chart, *case["re"], **{f"f{k}i": t for k, t in enumerate(case["im"])}))
    if op == "lame":
        result = ops.lame_direct(q, LameParams(LAME["mu"], LAME["lambda"]))
    else:
        result = getattr(ops, OPS[op])(q)
    got = ops.evaluate(result, case["points"])
    want = np.array([[complex(*z) for z in v[op]] for v in case["values"]])
    assert_close(got, want, 1e-12)
