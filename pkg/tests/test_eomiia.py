import random

import numpy as np
import pytest

from helpers import POINT, poly_dilaton, poly_forms, wavy_patch
from sugracheck.eomiia import (EINSTEIN_EQUATIONS, STRING_EQUATIONS, background_iia,
                               field_strengths, frame_convert_iia, frame_relations,
                               gauge_transform, minkowski_iia, residuals_iia, round_trip_error)
from sugracheck.fields import BackgroundError
from sugracheck.multivec import wedge
from sugracheck.patchcalc import d_poly
from sugracheck.variation import random_poly_form


@pytest.fixture(scope="module")
def random_string_bg():
    f = poly_forms({"H3": 3, "G2": 2, "G4": 4}, seed=1)
    return background_iia(patch=wavy_patch(seed=0), phi=poly_dilaton(seed=1), **f)


@pytest.fixture(scope="module")
def string_report(random_string_bg):
    return residuals_iia(random_string_bg, [POINT])


def test_flat_constant_dilaton_is_a_solution():
    for tag in ("string", "einstein"):
        rep = residuals_iia(minkowski_iia(phi=0.7, frame_tag=tag))
        assert rep.passed
        assert max(rep.residuals.values()) == 0.0


def test_report_covers_every_equation(string_report):
    assert set(STRING_EQUATIONS) <= set(string_report.residuals)


def test_trace_of_einstein_residual_is_scalar_combination(string_report):
    assert string_report.residuals["trace_identity"] < 1e-10


def test_simplified_variant_differs_by_dilaton_residual(string_report):
    assert string_report.residuals["variant_difference"] < 1e-10


def test_random_data_is_not_a_solution(string_report):
    assert string_report.residuals["einstein"] > 1e-3
    assert not string_report.passed


def test_einstein_frame_trace_identity(random_string_bg):
    rep = residuals_iia(frame_convert_iia(random_string_bg), [POINT])
    assert set(EINSTEIN_EQUATIONS) <= set(rep.residuals)
    assert rep.residuals["trace_identity"] < 1e-10


def test_frame_mismatch_is_an_error(random_string_bg):
    with pytest.raises(BackgroundError):
        residuals_iia(random_string_bg, [POINT], frame="einstein")


def test_frame_relations(random_string_bg):
    rep = frame_relations(random_string_bg, [POINT])
    assert rep["dvol"] < 1e-12 and rep["norm"] < 1e-12 and rep["hodge"] < 1e-12
    assert rep["scalar_curvature"] < 1e-5


def test_frame_round_trip(random_string_bg):
    assert round_trip_error(random_string_bg, [POINT]) < 1e-13
    assert round_trip_error(minkowski_iia(phi=0.4), []) < 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_bianchi_identities_from_potentials_exact(seed):
    r = random.Random(seed)
    B2, C1, C3 = (random_poly_form(10, k, r, ncomps=3) for k in (2, 1, 3))
    H3, G2, G4 = field_strengths(B2, C1, C3)
    assert d_poly(H3).is_zero() and d_poly(G2).is_zero()
    # the tilded four-form closes up to -H3^G2
    assert (d_poly(G4) + wedge(H3, G2)).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_gauge_invariance_exact(seed):
    r = random.Random(100 + seed)
    pots = [random_poly_form(10, k, r, ncomps=3) for k in (2, 1, 3)]
    params = [random_poly_form(10, k, r, ncomps=2) for k in (1, 0, 2)]
    before = field_strengths(*pots)
    after = field_strengths(*gauge_transform(*pots, *params))
    assert all(a == b for a, b in zip(before, after))


def test_potential_background_passes_bianchi():
    r = random.Random(3)
    pots = {"B2": random_poly_form(10, 2, r, max_poly_degree=1, ncomps=2),
            "C1": random_poly_form(10, 1, r, max_poly_degree=1, ncomps=2),
            "C3": random_poly_form(10, 3, r, max_poly_degree=1, ncomps=2)}
    bg = background_iia(patch=wavy_patch(seed=2), phi=poly_dilaton(seed=2), potentials=pots)
    rep = residuals_iia(bg, [POINT])
    for k in ("bianchi_H3", "bianchi_G2", "bianchi_G4"):
        assert rep.residuals[k] < 1e-8


def test_analytic_frame_conversion_rescales_components():
    from sugracheck.fields import AnalyticGeometry, Block
    from sugracheck.multivec import Form
    bg = background_iia(geometry=AnalyticGeometry([Block(10, 0.0)]), phi=0.8,
                        G2=Form(10, 2, {(0, 1): 1.0}))
    E = frame_convert_iia(bg)
    assert E.frame_tag == "einstein"
    assert E.forms["G2"][(0, 1)] == pytest.approx(np.exp(0.8 * 0.5))
    assert round_trip_error(bg, []) < 1e-15
