from __future__ import annotations

import math
import re

import numpy as np
import pytest

from quatcurv.errors import DefinitionError, DomainError, UnknownChart
from quatcurv.expr import evaluate
from quatcurv.geometry import BUILTIN_CHARTS, QuatField, builtin_chart
from quatcurv.harness import (
    GOLDEN_FORMS,
    IDENTITY_REGISTRY,
    cross_mode_suite,
    derivative_suite,
    generate_corpus,
    golden_spherical_suite,
    identity_suite,
    load_golden_forms,
)
from quatcurv.harness.corpus import REGIONS
from quatcurv.harness.suite import lame_params_for
from quatcurv.operators import OperatorConfig

# corpus


def test_corpus_deterministic():
    a = generate_corpus(42, 10, "spherical")
    b = generate_corpus(42, 10, "spherical")
    assert a.texts == b.texts
    assert all(fa.real_parts == fb.real_parts and fa.imag_parts == fb.imag_parts for fa, fb in zip(a.fields, b.fields))
    np.testing.assert_array_equal(a.sample_points(5, 3), b.sample_points(5, 3))


def test_corpus_depends_on_seed_and_chart():
    assert generate_corpus(42, 5, "spherical").texts != generate_corpus(43, 5, "spherical").texts
    assert generate_corpus(42, 5, "spherical").texts != generate_corpus(42, 5, "cylindrical").texts


@pytest.mark.parametrize("count", [0, -3])
def test_corpus_count_must_be_positive(count):
    with pytest.raises(ValueError):
        generate_corpus(42, count, "cartesian")


def test_corpus_unknown_chart():
    with pytest.raises(UnknownChart):
        generate_corpus(42, 5, "toroidal")


@pytest.mark.parametrize("chart", BUILTIN_CHARTS)
def test_corpus_screened_and_bounded(corpora, chart):
    corpus = corpora[chart]
    assert len(corpus.fields) == corpus.count == 50
    ch = builtin_chart(chart)
    pts = corpus.sample_points(50, salt=999)
    lo, hi = np.array(REGIONS[chart]).T
    assert np.all(pts >= lo) and np.all(pts <= hi)
    for f in corpus.fields:
        assert np.all(np.isfinite(f.values(pts)))
        for part in f.real_parts + f.imag_parts:
            assert part.free_symbols <= set(ch.coord_names)
    for texts in corpus.texts:
        for text in texts.values():
            for coeff in re.findall(r"(\d+\.\d+)\*", text):
                assert float(coeff) <= 2
            for arg in re.findall(r"(?:sin|cos)\(([^)]*)\)", text):
                assert arg in ch.coord_names or arg in ("q1", "q2", "q3"), text


def test_spherical_region_avoids_poles(corpora):
    pts = corpora["spherical"].sample_points(2000)
    assert pts[:, 0].min() >= 0.5 and 0.3 <= pts[:, 1].min() and pts[:, 1].max() <= math.pi - 0.3


def test_lame_params_valid_and_deterministic():
    for k in range(50):
        p = lame_params_for(42, k)
        assert 0.5 <= p.mu <= 3 and p.lam > -2 / 3 * p.mu
    assert lame_params_for(42, 7) == lame_params_for(42, 7)


# golden forms


def test_golden_forms_present():
    assert set(GOLDEN_FORMS) == {(c, op) for c in ("cartesian", "spherical") for op in ("mt", "lap0", "lapv", "bitsv")}


def test_golden_symbols_reference_only_field_components():
    for form in GOLDEN_FORMS.values():
        for name in form.field_symbols():
            assert re.fullmatch(r"f[0-3](_[a-z0-9]+)*", name), name


def test_golden_rejects_bad_symbols():
    doc = '{"schema_version": 1, "forms": [{"chart": "spherical", "operator": "lap0", "components": ["f0_x"]}]}'
    with pytest.raises(DefinitionError):
        load_golden_forms(doc)
    doc = '{"schema_version": 1, "forms": [{"chart": "spherical", "operator": "mt", "components": ["f0"]}]}'
    with pytest.raises(DefinitionError):
        load_golden_forms(doc)


def _golden_cases(oracle):
    for case in oracle["cases"]:
        for op in ("mt", "lap0", "lapv", "bitsv"):
            if (case["chart"], op) in GOLDEN_FORMS:
                yield case, op


def test_golden_forms_match_hand_oracle(oracle):
    """Each transcribed closed form reproduces the independent oracle at 3 points."""
    checked = 0
    for case, op in _golden_cases(oracle):
        form = GOLDEN_FORMS[(case["chart"], op)]
        chart = builtin_chart(case["chart"])
        f = QuatField.from_strings(chart, *case["re"], **{f"f{k}i": t for k, t in enumerate(case["im"])})
        got = form.evaluate(f, case["points"])
        assert got.shape == (3, len(form.slots))
        want = np.array([[complex(*v[op][s]) for s in form.slots] for v in case["values"]])
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)
        checked += 1
    assert checked == 16


def test_golden_radial_field():
    sph = builtin_chart("spherical")
    f = QuatField.from_strings(sph, f1="1")
    r = np.array([0.5, 1.0, 2.0])
    pts = np.column_stack([r, np.full(3, 1.0), np.zeros(3)])
    np.testing.assert_allclose(GOLDEN_FORMS[("spherical", "mt")].evaluate(f, pts)[:, 0], -2 / r, atol=1e-12)
    np.testing.assert_allclose(GOLDEN_FORMS[("spherical", "lapv")].evaluate(f, pts)[:, 0], -2 / r**2, atol=1e-12)
    g = QuatField.from_strings(sph, f0="r^2")
    np.testing.assert_allclose(GOLDEN_FORMS[("spherical", "lap0")].evaluate(g, pts)[:, 0], 6, atol=1e-12)


# suites


def test_registry_covers_every_identity():
    ids = [spec.id for spec in IDENTITY_REGISTRY]
    assert len(ids) == len(set(ids)) == 16


def test_registry_records_per_chart(verification):
    for chart in BUILTIN_CHARTS:
        names = {r.identity for r in verification.records if r.chart == chart}
        assert {spec.id for spec in IDENTITY_REGISTRY if spec.applies(chart)} <= names
    assert verification.record("cartesian_degeneration", "cartesian")
    with pytest.raises(KeyError):
        verification.record("cartesian_degeneration", "spherical")


def test_full_verification_passes(verification):
    assert verification.passed, [(r.identity, r.chart, r.max_error) for r in verification.failures()]
    assert verification.derivative_mode == "symbolic" and verification.corpus_seed == 42


def test_cartesian_symbolic_at_strict_tolerance(verification):
    for r in verification.records:
        if r.chart == "cartesian" and r.identity != "fd_cross_mode":
            assert r.max_error <= 1e-10, r


def test_lame_sign_diagnostic(verification):
    for chart in BUILTIN_CHARTS:
        d = verification.diagnostics["lame_sign"][chart]
        assert d["corrected_form_max_error"] <= 1e-8
        assert d["unsigned_form_max_error"] > 1.0
        assert "wrong overall sign" in d["resolution"]


def test_golden_spherical_suite_requires_spherical(corpora):
    with pytest.raises(ValueError):
        golden_spherical_suite(corpora["cartesian"])


def test_golden_spherical_suite_small():
    report = golden_spherical_suite(generate_corpus(42, 5, "spherical"))
    assert report.passed
    names = {r.identity for r in report.records}
    assert {"golden_mt", "golden_laplace_scalar", "golden_laplace_vector", "golden_bitsadze_vector"} <= names
    assert report.record("golden_anchor_mt_radial", "spherical").max_error <= 1e-12


def test_identity_suite_fd_mode_relaxed():
    corpus = generate_corpus(42, 6, "spherical")
    report = identity_suite(corpus, OperatorConfig.fd(1e-3), points_per_field=5)
    assert report.passed
    assert report.derivative_mode == "finite_difference" and report.fd_step == 1e-3
    assert all(r.tolerance == 1e-3 and r.tolerance_kind == "scaled" for r in report.records)


def test_identity_suite_records_failure_without_raising():
    corpus = generate_corpus(42, 3, "cartesian")
    report = identity_suite(corpus, points_per_field=4, tolerance=1e-30)
    assert not report.passed
    assert any(r.identity == "lame_direct_vs_factorized" and not r.passed for r in report.records)


def test_cross_mode_suite_richardson(corpora):
    report = cross_mode_suite(corpora["cylindrical"], OperatorConfig.fd(1e-3, "richardson"), points_per_field=5)
    rec = report.records[0]
    assert rec.passed and rec.tolerance_kind == "absolute" and "richardson" in rec.note


def test_derivative_suite(corpora):
    report = derivative_suite(corpora["spherical"], points=10)
    assert report.passed
    assert report.record("mixed_partials", "spherical").max_error <= 1e-10


def test_domain_error_recorded_not_raised(monkeypatch):
    corpus = generate_corpus(42, 2, "cartesian")
    import quatcurv.harness.suite as suite

    def boom(*args, **kwargs):
        raise DomainError("forced")

    monkeypatch.setattr(suite, "_checks_for_field", boom)
    report = identity_suite(corpus, points_per_field=3, cross_fields=0)
    failed = {r.identity for r in report.failures()}
    assert "factorization_laplace" in failed
    assert all(r.note.startswith("field 0: DomainError") for r in report.failures() if r.identity != "fd_cross_mode")


def test_sample_points_evaluate_on_chart(corpora):
    ch = builtin_chart("cylindrical")
    pts = corpora["cylindrical"].sample_points(3)
    assert np.all(np.isfinite(evaluate(ch.maps[0], ch.env(pts))))
