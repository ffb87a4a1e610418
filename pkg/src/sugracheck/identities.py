"""Randomized identity suites driven by ``sugracheck identities``.

Each suite maps identity names to pass counts. Exact identities compare
rational objects; numeric ones report the largest deviation. Output depends
only on the seed and the number of trials.
"""

import random
import warnings
from fractions import Fraction
from itertools import combinations

import numpy as np

SUITES = ("hodge", "clifford", "variation", "killing-equivalence", "reduction", "sl2")
EXACT = "exact"


class _Tally:
    def __init__(self):
        self.rows = {}

    def add(self, name, ok, deviation=None):
        row = self.rows.setdefault(name, {"passed": 0, "trials": 0, "dev": None})
        row["trials"] += 1
        row["passed"] += int(bool(ok))
        if deviation is not None:
            row["dev"] = max(row["dev"] or 0.0, float(deviation))

    def result(self):
        return {k: {"passed": v["passed"], "trials": v["trials"],
                    "max_deviation": EXACT if v["dev"] is None else f"{v['dev']:.3e}"}
                for k, v in self.rows.items()}


# ---------------------------------------------------------------------------
# random rational data
# ---------------------------------------------------------------------------

def rand_q(r, num=5, den=4):
    return Fraction(r.randint(-num, num), r.randint(1, den))


def rand_form(r, dim, degree, ncomps=4):
    from .multivec import Form
    combos = list(combinations(range(dim), degree))
    picks = r.sample(combos, min(ncomps, len(combos)))
    return Form(dim, degree, {I: rand_q(r) or Fraction(1) for I in picks})


def rand_vector(r, dim, nonzero=4):
    v = [Fraction(0)] * dim
    for i in r.sample(range(dim), min(nonzero, dim)):
        v[i] = rand_q(r)
    return v


def rand_exact_metric(r, dim, nentries=None):
    """g = B^T eta B with sparse rational B, so sqrt|det g| = |det B| is rational."""
    from .multivec import Metric, _det_exact
    nentries = dim if nentries is None else nentries
    while True:
        B = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        for _ in range(nentries):
            i, j = r.randrange(dim), r.randrange(dim)
            B[i][j] += rand_q(r, 2, 3)
        if _det_exact(B) != 0:
            break
    eta = [-1] + [1] * (dim - 1)
    g = [[sum(B[k][i] * eta[k] * B[k][j] for k in range(dim)) for j in range(dim)]
         for i in range(dim)]
    return Metric(g)


def rand_sl2(r, exact=True):
    """Product of elementary det-1 matrices."""
    q = (lambda: rand_q(r, 3, 3)) if exact else (lambda: r.uniform(-1.5, 1.5))
    t = Fraction(r.randint(1, 4), r.randint(1, 4)) if exact else r.uniform(0.5, 2.0)
    L = [[t, 0], [0, 1 / t]]
    from .eomiib import compose
    for E in ([[1, q()], [0, 1]], [[1, 0], [q(), 1]]):
        L = compose(L, E)
    return L


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_hodge(r, trials):
    from .multivec import (Form, Metric, hodge_star, interior, norm_sq, scalar_product,
                           volume_form, wedge)
    t = _Tally()
    for trial in range(trials):
        n = (4, 10, 11)[trial % 3]
        g = rand_exact_metric(r, n, nentries=3)
        k = r.randint(0, min(5, n))
        F, G = rand_form(r, n, k, 3), rand_form(r, n, k, 3)
        lhs = wedge(F, hodge_star(G, g))
        t.add("defining_relation", (lhs - volume_form(g) * scalar_product(F, G, g)).is_zero())
        sign = -(-1) ** (k * (n - k))
        t.add("double_star", (hodge_star(hodge_star(F, g), g) - F * sign).is_zero())
        if k >= 1:
            total = 0
            basis = [[int(i == m) for i in range(n)] for m in range(n)]
            iG = [interior(basis[m], G) for m in range(n)]
            for mu in range(n):
                for nu in range(n):
                    c = g.inverse[mu][nu]
                    if c != 0:
                        total += c * scalar_product(iG[mu], iG[nu], g)
            t.add("trace_lemma", total == k * norm_sq(G, g))
        eta = Metric.minkowski(n)
        a0 = Form(n, 1, {(0,): 1})
        a01 = Form(n, 2, {(0, 1): 1})
        t.add("minkowski_star_first_covector",
              hodge_star(a0, eta) == Form(n, n - 1, {tuple(range(1, n)): -1}))
        t.add("minkowski_star_first_pair",
              hodge_star(a01, eta) == Form(n, n - 2, {tuple(range(2, n)): -1}))
    return t.result()


def suite_clifford(r, trials):
    from .clifford import (chirality_operator, clifford_matrix, expected_real_dimension,
                           minimal_real_dimension, vector_matrix)
    from .gaussq import QMat
    from .killing import gamma_rep
    from .multivec import Form, interior, wedge
    t = _Tally()
    for trial in range(trials):
        d = (4, 10, 11)[trial % 3]
        rep = gamma_rep(d)
        N = rep.spinor_dim
        Z = QMat.zeros((N, N))

        def cm(F):
            return clifford_matrix(F, rep, exact=True) if F.coeffs else Z
        k = r.randint(0, min(5, d - 1))
        F = rand_form(r, d, k, 3)
        alpha = Form(d, 1, {(i,): c for i, c in enumerate(rand_vector(r, d, 3)) if c})
        a_sharp = [int(rep.eta[i]) * alpha.coeffs.get((i,), 0) for i in range(d)]
        lhs = cm(wedge(alpha, F))
        rhs = cm(alpha) @ cm(F)
        if k:
            rhs = rhs - cm(interior(a_sharp, F))
        t.add("wedge_exchange", (lhs - rhs).is_zero())
        X = rand_vector(r, d, 3)
        Xm = vector_matrix(X, rep, exact=True)
        comm = Xm @ cm(F) + (cm(F) @ Xm) * (-1) ** (k + 1)
        iXF = cm(interior(X, F)) if k else Z
        t.add("vector_commutation", (comm - iXF * 2).is_zero())
        de = (4, 6, 8, 10)[trial % 4]
        rep_e = gamma_rep(de)
        chi = QMat(chirality_operator(rep_e))
        I = QMat.identity(rep_e.spinor_dim)
        ok = (chi @ chi - I).is_zero()
        gam = [QMat(rep_e.gammas[a]) for a in range(de)]
        ok = ok and all((chi @ g_ + g_ @ chi).is_zero() for g_ in gam)
        ok = ok and all((chi @ (gam[a] @ gam[b]) - (gam[a] @ gam[b]) @ chi).is_zero()
                        for a in range(de) for b in range(a + 1, de))
        t.add("chirality_properties", ok)
        ds = 4 + trial % 8
        t.add("structure_table",
              minimal_real_dimension(gamma_rep(ds)) == expected_real_dimension(ds))
    return t.result()


def suite_variation(r, trials):
    from .multivec import Form
    from .variation import form_variation_check, metric_variation_check, random_poly_form
    t = _Tally()
    nrng = np.random.default_rng(r.randrange(2 ** 32))
    for trial in range(trials):
        n = (4, 5, 11)[trial % 3]
        A = nrng.normal(size=(n, n)) * 0.2
        B = np.eye(n) + A
        g = B.T @ np.diag([-1.0] + [1.0] * (n - 1)) @ B
        k = r.randint(1, min(4, n))
        combos = list(combinations(range(n), k))
        G = Form(n, k, {combos[i]: float(nrng.normal())
                        for i in nrng.choice(len(combos), min(4, len(combos)), replace=False)})
        entry = tuple(sorted((r.randrange(n), r.randrange(n))))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rep = metric_variation_check(G, g, entry)
        t.add("metric_variation", rep.passed, max(rep.rel_error.values()))
        d = (4, 10, 11)[trial % 3]
        kf = 1 + trial % 3
        gq = rand_exact_metric(r, d, nentries=2)
        C = random_poly_form(d, kf, r, ncomps=2)
        dC = random_poly_form(d, kf, r, ncomps=2)
        fr = form_variation_check(C, dC, gq)
        t.add("form_variation_by_parts", fr.differences["integration_by_parts"])
        t.add("form_variation_symmetry", fr.differences["symmetry"])
    return t.result()


def suite_killing(r, trials):
    from .killing import (FieldData, clifford_commutator_identity, formulation_gap,
                          gravitino11_forms, gamma_rep, matrices_equal, susy_kernel)
    from .clifford import real_structure
    t = _Tally()
    rep11 = gamma_rep(11)
    for _ in range(trials):
        G = rand_form(r, 11, 4, 4)
        X = rand_vector(r, 11, 4)
        f = gravitino11_forms(G, X, rep11, True)
        t.add("gravitino_three_forms", matrices_equal(f["interior"], f["left"])
              and matrices_equal(f["left"], f["sandwich"]))
        a, b = clifford_commutator_identity(G, X, rep11)
        t.add("clifford_commutator", matrices_equal(a, b))
        fd = FieldData(10, {"H3": rand_form(r, 10, 3, 3), "G1": rand_form(r, 10, 1, 2),
                            "G3": rand_form(r, 10, 3, 3), "G5": rand_form(r, 10, 5, 3)},
                       ephi=Fraction(r.randint(1, 5), r.randint(1, 3)),
                       dphi=rand_vector(r, 10, 3))
        gap = formulation_gap(fd, rand_vector(r, 10, 3))
        t.add("iib_doublet_complex", all(v == 0 for v in gap.values()))
    flat = FieldData(11, {"G": rand_form(r, 11, 4, 0)})
    ops = [gravitino11_forms(flat.forms["G"], [int(i == a) for i in range(11)], rep11,
                             True)["interior"] for a in range(11)]
    res = susy_kernel(ops, real_structure(rep11), exact=True)
    t.add("flat_susy_count_32", res.dim == 32)
    return t.result()


def suite_reduction(r, trials):
    from .reduction import (chern_simons_check, exact_metric_checks, mixed_gamma_identity,
                            killing_reduction_check, random_killing_data)
    from .variation import random_poly_form
    t = _Tally()
    nrng = np.random.default_rng(r.randrange(2 ** 32))
    t.add("mixed_gamma_identity", mixed_gamma_identity())
    for trial in range(trials):
        out = killing_reduction_check(random_killing_data(nrng), bbs=bool(trial % 2))
        t.add("killing_lift", all(out.values()))
        cs = chern_simons_check(random_poly_form(10, 1, r, ncomps=2),
                                random_poly_form(10, 2, r, ncomps=2),
                                random_poly_form(10, 3, r, ncomps=2))
        t.add("chern_simons_split", cs["chern_simons"])
        t.add("lifted_field_strength", cs["field_strength"])
        gN = rand_exact_metric(r, 10, nentries=3).components
        c = rand_vector(r, 10, 3)
        u = Fraction(r.randint(1, 4), r.randint(1, 3))
        t.add("block_metric", all(exact_metric_checks(gN, c, u).values()))
    return t.result()


def suite_sl2(r, trials):
    from .eomiib import compose, lagrangian_density, mobius, sl2_transform, symmetric_fields_at
    from .multivec import Form
    t = _Tally()
    nrng = np.random.default_rng(r.randrange(2 ** 32))

    def fform(k, m=4):
        combos = list(combinations(range(10), k))
        return Form(10, k, {combos[i]: float(nrng.normal())
                            for i in nrng.choice(len(combos), m, replace=False)})
    for _ in range(trials):
        sf = symmetric_fields_at(float(nrng.normal()) * 0.5, float(nrng.normal()),
                                 nrng.normal(size=10), fform(3), fform(1, 3), fform(3), fform(5))
        L = rand_sl2(r, exact=False)
        before, after = lagrangian_density(sf), lagrangian_density(sl2_transform(sf, L))
        scale = max(1.0, max(abs(v) for v in before.values()))
        dev = max(abs(after[k] - before[k]) for k in before) / scale
        t.add("lagrangian_invariance", dev < 1e-10, dev)
        L2 = rand_sl2(r, exact=False)
        two = sl2_transform(sl2_transform(sf, L2), L)
        one = sl2_transform(sf, compose(L, L2))
        dev = max(abs(two.tau - one.tau), float(np.max(np.abs(two.M - one.M))))
        t.add("field_action_composition", dev < 1e-10, dev)
        A, B = rand_sl2(r), rand_sl2(r)
        tau = (rand_q(r), Fraction(r.randint(1, 5), r.randint(1, 4)))
        t.add("moebius_group_law", mobius(compose(A, B), tau) == mobius(A, mobius(B, tau)))
    return t.result()


_RUNNERS = {"hodge": suite_hodge, "clifford": suite_clifford, "variation": suite_variation,
            "killing-equivalence": suite_killing, "reduction": suite_reduction, "sl2": suite_sl2}


def run_suite(name, seed=0, trials=20):
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return _RUNNERS[name](random.Random(seed), trials)
