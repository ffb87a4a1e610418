import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from sugracheck.identities import rand_exact_metric, rand_form
from sugracheck.multivec import (DegreeError, Form, Metric, MetricError, flat, frame_components,
                                 hodge_star, interior, minor_transform, norm_sq, raise_indices,
                                 scalar_product, sharp, volume_form, wedge)

seeds = st.integers(0, 10 ** 6)


def setup(seed, n_choices=(3, 4, 5, 6)):
    r = random.Random(seed)
    n = r.choice(n_choices)
    return r, n, rand_exact_metric(r, n, nentries=3)


# --- worked examples -------------------------------------------------------

def test_volume_coefficient_of_diagonal_metric():
    g = Metric([[-4, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert volume_form(g) == Form(3, 3, {(0, 1, 2): 2})


@pytest.mark.parametrize("n", [4, 10, 11])
def test_minkowski_star_of_first_covectors(n):
    eta = Metric.minkowski(n)
    assert hodge_star(Form(n, 1, {(0,): 1}), eta) == Form(n, n - 1, {tuple(range(1, n)): -1})
    assert hodge_star(Form(n, 2, {(0, 1): 1}), eta) == Form(n, n - 2, {tuple(range(2, n)): -1})


@pytest.mark.parametrize("n", [4, 10, 11])
def test_star_of_one_and_volume(n):
    eta = Metric.minkowski(n)
    dvol = volume_form(eta)
    assert hodge_star(Form.scalar(n, 1), eta) == dvol
    assert hodge_star(dvol, eta) == Form.scalar(n, -1)
    assert norm_sq(dvol, eta) == -1


def test_defining_relation_all_basis_pairs_dim11():
    eta = Metric.minkowski(11)
    dvol = volume_form(eta)
    for k in range(6):
        basis = [Form.basis(11, I) for I in combinations(range(11), k)]
        for i, F in enumerate(basis):
            # off-diagonal basis pairs vanish; checking a window keeps this fast
            for G in basis[max(0, i - 3):i + 4]:
                assert wedge(F, hodge_star(G, eta)) == dvol * scalar_product(F, G, eta)


def test_wedge_overflow_and_interior_of_scalar_raise():
    with pytest.raises(DegreeError):
        wedge(Form(3, 2, {(0, 1): 1}), Form(3, 2, {(1, 2): 1}))
    with pytest.raises(DegreeError):
        interior([1, 0, 0], Form.scalar(3, 1))


def test_metric_rejects_bad_signature():
    with pytest.raises(MetricError):
        Metric([[1, 0], [0, 1]])
    with pytest.raises(MetricError):
        Metric([[-1, 0], [0, 0]])
    with pytest.raises(MetricError):
        Metric([[-1, 1], [0, 1]])


def test_basis_with_unsorted_index_picks_sign():
    assert Form.basis(4, (2, 0)) == Form(4, 2, {(0, 2): -1})
    assert Form(4, 2, {(0, 2): 3})[(2, 0)] == -3


# --- oracle comparisons ----------------------------------------------------

@given(seeds)
def test_wedge_matches_permutation_sum(seed):
    r = random.Random(seed)
    n = r.choice([3, 4, 5])
    k = r.randint(0, n)
    l = r.randint(0, n - k)
    F, G = rand_form(r, n, k, 3), rand_form(r, n, l, 3)
    assert wedge(F, G).coeffs == oracles.wedge(F, G)


@given(seeds)
def test_interior_matches_dense_contraction(seed):
    r = random.Random(seed)
    n = r.choice([3, 4, 5, 6])
    k = r.randint(1, n)
    F = rand_form(r, n, k, 4)
    X = [Fraction(r.randint(-3, 3), r.randint(1, 3)) for _ in range(n)]
    assert interior(X, F).coeffs == oracles.interior(X, F)


@given(seeds)
def test_scalar_product_matches_dense_contraction(seed):
    r, n, g = setup(seed)
    k = r.randint(0, n)
    F, G = rand_form(r, n, k, 3), rand_form(r, n, k, 3)
    assert scalar_product(F, G, g) == oracles.scalar_product(F, G, g.components)


@given(seeds)
def test_hodge_matches_epsilon_formula(seed):
    r, n, g = setup(seed)
    k = r.randint(0, n)
    G = rand_form(r, n, k, 3)
    assert hodge_star(G, g).coeffs == oracles.hodge(G, g.components, g.sqrt_det)


# --- invariants ------------------------------------------------------------

@given(seeds)
def test_defining_relation_random(seed):
    r, n, g = setup(seed)
    k = r.randint(0, n)
    F, G = rand_form(r, n, k, 3), rand_form(r, n, k, 3)
    assert wedge(F, hodge_star(G, g)) == volume_form(g) * scalar_product(F, G, g)


@given(seeds)
def test_double_star_sign(seed):
    r, n, g = setup(seed)
    k = r.randint(0, n)
    F = rand_form(r, n, k, 3)
    assert hodge_star(hodge_star(F, g), g) == F * (-(-1) ** (k * (n - k)))


@given(seeds)
def test_graded_commutativity_and_leibniz(seed):
    r = random.Random(seed)
    n = 6
    k, l = r.randint(0, 3), r.randint(1, 3)
    F, G = rand_form(r, n, k, 3), rand_form(r, n, l, 3)
    assert wedge(F, G) == wedge(G, F) * (-1) ** (k * l)
    X = [Fraction(r.randint(-2, 2)) for _ in range(n)]
    lhs = interior(X, wedge(F, G))
    rhs = wedge(F, interior(X, G)) * (-1) ** k
    if k:
        rhs = rhs + wedge(interior(X, F), G)
    assert lhs == rhs


@given(seeds)
def test_flat_sharp_inverse(seed):
    r, n, g = setup(seed)
    X = [Fraction(r.randint(-3, 3), r.randint(1, 2)) for _ in range(n)]
    assert sharp(flat(X, g), g) == X


@given(seeds)
def test_trace_lemma(seed):
    r, n, g = setup(seed, (4, 5, 6))
    k = r.randint(1, min(5, n))
    G = rand_form(r, n, k, 3)
    iG = [interior([int(i == m) for i in range(n)], G) for m in range(n)]
    total = sum(g.inverse[m][v] * scalar_product(iG[m], iG[v], g)
                for m in range(n) for v in range(n) if g.inverse[m][v])
    assert total == k * norm_sq(G, g)


def test_float_and_exact_paths_agree():
    r = random.Random(3)
    g = rand_exact_metric(r, 6, nentries=4)
    gf = Metric(np.array(g.components, dtype=float))
    F = rand_form(r, 6, 3, 5)
    Ff = F.to_float()
    assert abs(float(norm_sq(F, g)) - norm_sq(Ff, gf)) < 1e-10
    assert (hodge_star(Ff, gf) - hodge_star(F, g).to_float()).max_abs() < 1e-10
    assert (raise_indices(Ff, gf) - raise_indices(F, g).to_float()).max_abs() < 1e-10


def test_frame_components_exact_and_float_agree():
    r = random.Random(5)
    F = rand_form(r, 5, 2, 4)
    E = np.array([[Fraction(int(i == j)) + Fraction(i * j % 3, 4) for j in range(5)]
                  for i in range(5)], dtype=object)
    exact = frame_components(F, E)
    numeric = minor_transform(E.astype(float), F.to_float())
    assert (exact.to_float() - numeric).max_abs() < 1e-12
