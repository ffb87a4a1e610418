import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES
from sugracheck.bgspec import (ExprError, SpecError, build_background, load_spec,
                               parse_expression, parse_spec)
from sugracheck.poly import Poly


def spec_of(doc):
    return parse_spec(doc, json.dumps(doc, indent=2), "<test>")


@pytest.mark.parametrize("text,value", [
    ("1 + 2*3", 7), ("(1 + 2)*3", 9), ("(2^3)^2", 64), ("2**3", 8), ("-x^2", -4),
    ("x/4 - 1/2", 0), ("3 - -1", 4), ("1.5 * x", 3),
])
def test_arithmetic(text, value):
    e = parse_expression(text, ["x"])
    assert e.polynomial
    assert e.value([2]) == value


def test_polynomial_conversion():
    e = parse_expression("x*y/3 + y^2 - 1", ["x", "y"])
    assert e.poly(2) == Poly(2, {(1, 1): Fraction(1, 3), (0, 2): 1, (0, 0): -1})


def test_exp_and_phi_are_numeric():
    e = parse_expression("exp(x) + phi", ["x"], allow_phi=True)
    assert not e.polynomial and e.uses_phi
    assert e.value([1.0], phi=lambda x: 2.0) == pytest.approx(math.e + 2)


@pytest.mark.parametrize("text", ["1 +", "2^3^2", "x^-1", "x^1.5", "foo", "phi", "(1", "1 2", "x^y", ""])
def test_rejected_expressions(text):
    with pytest.raises(ExprError):
        parse_expression(text, ["x", "y"])


@given(st.lists(st.integers(-9, 9), min_size=3, max_size=3), st.integers(0, 4))
def test_polynomial_agrees_with_evaluation(coeffs, k):
    a, b, c = coeffs
    text = f"{a}*x^{k} + ({b})*x*y - {c}"
    e = parse_expression(text, ["x", "y"])
    for pt in ([1, 2], [-3, 5], [Fraction(1, 2), 0]):
        assert e.poly(2)(pt) == e.value(pt)


def test_fixtures_load():
    for name in ("minkowski11", "freund_rubin", "iia_polynomial", "iia_two_points"):
        spec = load_spec(FIXTURES / f"{name}.json")
        assert spec.theory in ("m11", "iia-string")
    assert load_spec(FIXTURES / "freund_rubin.json").analytic
    assert not load_spec(FIXTURES / "iia_polynomial.json").analytic


def test_dimension_error_has_field_and_line():
    with pytest.raises(SpecError) as exc:
        load_spec(FIXTURES / "bad_dim9.json")
    assert "chart.dim" in str(exc.value) and "line 3" in str(exc.value)


def _patch_doc(**extra):
    coords = ["t"] + [f"x{i}" for i in range(1, 11)]
    doc = {"theory": "m11", "chart": {"coordinates": coords},
           "metric": {"components": {"x1,x1": "1 + x2^2/10"}},
           "probe_points": [[0.1] * 11]}
    doc.update(extra)
    return doc


def test_unspecified_metric_entries_default_to_minkowski():
    spec = spec_of(_patch_doc())
    bg = build_background(spec)
    g = bg.patch.g(np.full(11, 0.1))
    assert g[0, 0] == -1 and g[1, 1] == pytest.approx(1.001) and g[5, 5] == 1 and g[0, 3] == 0


def test_form_keys_pick_up_permutation_sign():
    spec = spec_of(_patch_doc(forms={"G": {"x2,x1,x3,x4": "2"}}))
    bg = build_background(spec)
    G = bg.forms["G"](np.full(11, 0.1))
    assert G.coeffs == {(1, 2, 3, 4): -2.0}


def test_potentials_become_exact_field_strengths():
    spec = spec_of(_patch_doc(potentials={"C": {"x1,x2,x3": "t*x4"}}))
    bg = build_background(spec)
    assert bg.potentials["C"].degree == 3
    # d(t x4 dx1^dx2^dx3) = x4 dt^dx1^dx2^dx3 - t dx1^dx2^dx3^dx4
    G = bg.forms["G"](np.array([0.5] + [0.0] * 3 + [0.25] + [0.0] * 6))
    assert G.coeffs == {(0, 1, 2, 3): 0.25, (1, 2, 3, 4): -0.5}


@pytest.mark.parametrize("extra,needle", [
    ({"forms": {"G": {"x1,x1,x2,x3": "1"}}}, "forms"),
    ({"forms": {"G": {"x1,x2": "1"}}}, "forms"),
    ({"forms": {"H3": {"x1,x2,x3": "1"}}}, "H3"),
    ({"probe_points": [[5.0] * 11]}, "probe_points"),
    ({"probe_points": [[0.0] * 10]}, "probe_points"),
    ({"potentials": {"C": {"x1,x2,x3": "exp(t)"}}}, "potentials"),
    ({"forms": {"G": {"x1,x2,x3,x4": "1"}}, "potentials": {"C": {"x1,x2,x3": "t"}}}, "potentials"),
])
def test_semantic_errors(extra, needle):
    doc = _patch_doc(**extra)
    if "probe_points" in extra and extra["probe_points"][0][0] == 5.0:
        doc["chart"]["domain"] = [[-1, 1]] * 11
    with pytest.raises(SpecError) as exc:
        build_background(spec_of(doc))
    assert needle in str(exc.value)


def test_reserved_coordinate_names():
    doc = _patch_doc()
    doc["chart"]["coordinates"][3] = "phi"
    with pytest.raises(SpecError):
        spec_of(doc)


def test_degenerate_metric_rejected():
    doc = _patch_doc(metric={"components": {"t,t": "0"}})
    with pytest.raises(SpecError) as exc:
        build_background(spec_of(doc))
    assert "metric" in str(exc.value)


def test_product_family():
    doc = {"theory": "m11", "metric": {"family": "product",
                                       "blocks": [[4, -0.25], [7, 0.1]]}}
    bg = build_background(spec_of(doc))
    assert bg.geometry.scalar() == pytest.approx(12 * -0.25 + 42 * 0.1)
    doc["metric"]["blocks"][1][0] = 6
    with pytest.raises(SpecError):
        spec_of(doc)


def test_analytic_forms_must_be_constant():
    doc = {"theory": "m11", "metric": "minkowski", "forms": {"G": {"0,1,2,3": "x1"}}}
    with pytest.raises(SpecError):
        build_background(spec_of(doc))


def test_iib_axion_scalar():
    doc = {"theory": "iib-einstein", "metric": "minkowski", "scalars": {"phi": 0.2, "C0": 0.5}}
    bg = build_background(spec_of(doc))
    assert bg.scalars["C0"] == pytest.approx(0.5)
