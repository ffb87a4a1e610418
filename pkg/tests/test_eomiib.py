import math
import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import POINT, poly_dilaton, poly_forms, wavy_patch
from sugracheck.eomiib import (axion_dilaton, background_iib, compose, field_strengths,
                               gauge_transform, lagrangian_density, minkowski_iib, mobius,
                               moduli_matrix, reconstruct, residuals_iib,
                               residuals_iib_symmetric, sl2_transform, symmetric_fields,
                               symmetric_fields_at)
from sugracheck.fields import AnalyticGeometry, BackgroundError, Block, frame_star
from sugracheck.identities import rand_sl2
from sugracheck.multivec import Form, wedge
from sugracheck.patchcalc import d_poly
from sugracheck.variation import random_poly_form

DEG = {"H3": 3, "G1": 1, "G3": 3, "G5": 5}


@pytest.fixture(scope="module")
def string_bg():
    return background_iib(patch=wavy_patch(seed=1), phi=poly_dilaton(seed=2), C0=0.3,
                          **poly_forms(DEG, seed=2))


@pytest.fixture(scope="module")
def einstein_bg():
    return background_iib(patch=wavy_patch(seed=1), phi=poly_dilaton(seed=2), C0=0.3,
                          frame_tag="einstein", **poly_forms(DEG, seed=2))


def test_flat_is_a_solution():
    for tag in ("string", "einstein"):
        rep = residuals_iib(minkowski_iib(phi=0.2, frame_tag=tag))
        assert rep.passed and max(rep.residuals.values()) == 0.0
    rep = residuals_iib_symmetric(minkowski_iib(frame_tag="einstein"))
    assert rep.passed


def test_string_trace_identity_and_variant(string_bg):
    rep = residuals_iib(string_bg, [POINT])
    assert rep.residuals["trace_identity"] < 1e-10
    assert rep.residuals["variant_difference"] < 1e-10


def test_einstein_trace_identity(einstein_bg):
    rep = residuals_iib(einstein_bg, [POINT])
    assert rep.residuals["trace_identity"] < 1e-10


def test_symmetric_equations_reduce_to_einstein_frame(einstein_bg):
    rep = residuals_iib_symmetric(einstein_bg, [POINT])
    for k, v in rep.residuals.items():
        if k.endswith("_equivalence"):
            assert v < 1e-9, k


def test_symmetric_needs_einstein_frame(string_bg):
    with pytest.raises(BackgroundError):
        residuals_iib_symmetric(string_bg, [POINT])
    with pytest.raises(BackgroundError):
        symmetric_fields(string_bg, POINT)


def test_self_dual_five_form():
    rng = np.random.default_rng(0)
    combos = list(combinations(range(10), 5))
    F = Form(10, 5, {combos[i]: float(rng.normal()) for i in rng.choice(252, 6, replace=False)})
    G5 = F + frame_star(F)
    assert (frame_star(G5) - G5).max_abs() < 1e-14
    bg = background_iib(geometry=AnalyticGeometry([Block(10, 0.0)]), frame_tag="einstein",
                        G5=G5)
    assert residuals_iib_symmetric(bg).residuals["self_duality"] < 1e-14
    bg = background_iib(geometry=AnalyticGeometry([Block(10, 0.0)]), frame_tag="einstein", G5=F)
    assert residuals_iib_symmetric(bg).residuals["self_duality"] > 0.1


@pytest.mark.parametrize("seed", range(4))
def test_bianchi_and_gauge_invariance_exact(seed):
    r = random.Random(seed)
    B2, C0, C2, C4 = (random_poly_form(10, k, r, ncomps=3) for k in (2, 0, 2, 4))
    H3, G1, G3t, G5t = field_strengths(B2, C0, C2, C4)
    assert (d_poly(G3t) - wedge(H3, G1)).is_zero()
    assert (d_poly(G5t) - wedge(H3, G3t)).is_zero()
    params = [random_poly_form(10, k, r, ncomps=2) for k in (1, 1, 3)]
    after = field_strengths(*gauge_transform(B2, C0, C2, C4, *params))
    assert all(a == b for a, b in zip((H3, G1, G3t, G5t), after))


def test_fixed_point_of_s_transformation():
    S = [[0, 1], [-1, 0]]
    assert mobius(S, (Fraction(0), Fraction(1))) == (0, 1)
    assert mobius(S, (Fraction(1), Fraction(1))) == (Fraction(-1, 2), Fraction(1, 2))


def test_axion_dilaton_and_moduli():
    tau = axion_dilaton(0.3, 0.5)
    assert tau == complex(0.3, math.exp(-0.5))
    M = moduli_matrix(0.3, 0.5)
    assert np.linalg.det(M) == pytest.approx(1.0)
    assert np.allclose(M, M.T)


def _sym_fields(rng):
    def fform(k, m=4):
        combos = list(combinations(range(10), k))
        return Form(10, k, {combos[i]: float(rng.normal())
                            for i in rng.choice(len(combos), m, replace=False)})
    return symmetric_fields_at(float(rng.normal()) * 0.5, float(rng.normal()),
                               rng.normal(size=10), fform(3), fform(1, 3), fform(3), fform(5))


def test_reconstruct_inverts_the_packaging():
    rng = np.random.default_rng(3)
    sf = _sym_fields(rng)
    phi, C0, H3, G3t = reconstruct(sf)
    assert phi == pytest.approx(sf.phi) and C0 == pytest.approx(sf.C0)
    H, G = sf.F3
    assert (H3 - H).max_abs() < 1e-12
    assert (G3t - (G - H * sf.C0)).max_abs() < 1e-12


@given(st.integers(0, 10 ** 6))
def test_lagrangian_invariance(seed):
    rng = np.random.default_rng(seed)
    sf = _sym_fields(rng)
    L = rand_sl2(random.Random(seed), exact=False)
    before = lagrangian_density(sf)
    after = lagrangian_density(sl2_transform(sf, L))
    scale = max(1.0, max(abs(v) for v in before.values()))
    assert max(abs(after[k] - before[k]) for k in before) / scale < 1e-10


def test_non_unimodular_rejected():
    sf = _sym_fields(np.random.default_rng(0))
    with pytest.raises(BackgroundError):
        sl2_transform(sf, [[2.0, 0.0], [0.0, 1.0]])


@given(st.integers(0, 10 ** 6))
def test_group_law_exact(seed):
    r = random.Random(seed)
    A, B = rand_sl2(r), rand_sl2(r)
    tau = (Fraction(r.randint(-5, 5), 3), Fraction(r.randint(1, 5), r.randint(1, 4)))
    assert mobius(compose(A, B), tau) == mobius(A, mobius(B, tau))


def test_field_action_composes():
    rng = np.random.default_rng(5)
    sf = _sym_fields(rng)
    r = random.Random(5)
    A, B = rand_sl2(r, exact=False), rand_sl2(r, exact=False)
    two = sl2_transform(sl2_transform(sf, B), A)
    one = sl2_transform(sf, compose(A, B))
    assert abs(two.tau - one.tau) < 1e-12
    assert np.allclose(two.M, one.M, atol=1e-12)
