"""Acceptance criteria 1-11, one test each.

Each test records a single PASS/FAIL line that is printed in the pytest
terminal summary (and by running this file directly).
"""

import math
import random
import time
import warnings
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from conftest import FIXTURES
from helpers import POINT, poly_dilaton, poly_forms, wavy_patch

RESULTS = {}
BUDGET = 60.0


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures = []
        self.details = []

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if elapsed > BUDGET:
            self.failures.append(f"took {elapsed:.1f}s (budget {BUDGET:.0f}s)")
        status = "PASS" if not self.failures else "FAIL"
        info = "; ".join(self.failures or self.details)
        RESULTS[self.number] = f"criterion {self.number:2d} {status}  {self.title} " \
                               f"[{elapsed:.1f}s] {info}"
        print(RESULTS[self.number])
        if exc is None:
            assert not self.failures, RESULTS[self.number]
        return False


# ---------------------------------------------------------------------------

def test_criterion_01_conventions():
    from sugracheck.multivec import Form, Metric, hodge_star, scalar_product, volume_form, wedge
    with Criterion(1, "Hodge conventions and defining relation (exact)") as c:
        for n in (4, 10, 11):
            eta = Metric.minkowski(n)
            c.check(hodge_star(Form(n, 1, {(0,): 1}), eta)
                    == Form(n, n - 1, {tuple(range(1, n)): -1}), f"*a0 in dim {n}")
            c.check(hodge_star(Form(n, 2, {(0, 1): 1}), eta)
                    == Form(n, n - 2, {tuple(range(2, n)): -1}), f"*(a0^a1) in dim {n}")
        n = 11
        eta = Metric.minkowski(n)
        dvol = volume_form(eta)
        pairs = bad = 0
        for k in range(6):
            basis = [Form.basis(n, I) for I in combinations(range(n), k)]
            stars = [hodge_star(G, eta) for G in basis]
            for F in basis:
                for G, sG in zip(basis, stars):
                    pairs += 1
                    bad += wedge(F, sG) != dvol * scalar_product(F, G, eta)
        c.check(bad == 0, f"{bad} basis pairs violate F^*G = <F,G> dvol")
        c.note(f"{pairs} basis pairs exact")


def test_criterion_02_trace_lemma():
    from sugracheck.identities import rand_exact_metric, rand_form
    from sugracheck.multivec import interior, norm_sq, scalar_product
    with Criterion(2, "trace lemma on 200 random rational (g, G)") as c:
        r = random.Random(2)
        bad = 0
        for trial in range(200):
            n = r.randint(4, 11)
            g = rand_exact_metric(r, n, nentries=3)
            k = r.randint(1, min(5, n))
            G = rand_form(r, n, k, 3)
            iG = [interior([int(i == m) for i in range(n)], G) for m in range(n)]
            total = sum(g.inverse[m][v] * scalar_product(iG[m], iG[v], g)
                        for m in range(n) for v in range(n) if g.inverse[m][v] != 0)
            bad += total != k * norm_sq(G, g)
        c.check(bad == 0, f"{bad}/200 trials differ")
        c.note("200/200 exact")


def test_criterion_03_clifford():
    from sugracheck.clifford import (chirality_operator, clifford_matrix,
                                     expected_real_dimension, minimal_real_dimension,
                                     vector_matrix)
    from sugracheck.gaussq import QMat
    from sugracheck.identities import rand_form, rand_vector
    from sugracheck.killing import gamma_rep
    from sugracheck.multivec import Form, interior, wedge
    with Criterion(3, "Clifford identities, chirality, structure table (exact)") as c:
        r = random.Random(3)
        for d in (4, 10, 11):
            rep = gamma_rep(d)
            Z = QMat.zeros((rep.spinor_dim,) * 2)

            def cm(F):
                return clifford_matrix(F, rep, exact=True) if F.coeffs else Z
            bad_w = bad_c = 0
            for _ in range(100):
                k = r.randint(1, min(5, d - 1))
                F = rand_form(r, d, k, 3)
                alpha = Form(d, 1, {(i,): v for i, v in enumerate(rand_vector(r, d, 3)) if v})
                a_sharp = [int(rep.eta[i]) * alpha.coeffs.get((i,), 0) for i in range(d)]
                bad_w += not (cm(wedge(alpha, F))
                              - (cm(alpha) @ cm(F) - cm(interior(a_sharp, F)))).is_zero()
                X = rand_vector(r, d, 3)
                Xm = vector_matrix(X, rep, exact=True)
                comm = Xm @ cm(F) - (cm(F) @ Xm) * (-1) ** k
                bad_c += not (comm - cm(interior(X, F)) * 2).is_zero()
            c.check(bad_w == 0, f"wedge identity fails {bad_w}/100 in d={d}")
            c.check(bad_c == 0, f"commutator identity fails {bad_c}/100 in d={d}")
        for d in (4, 6, 8, 10):
            rep = gamma_rep(d)
            chi = QMat(chirality_operator(rep))
            gam = [QMat(g) for g in rep.gammas]
            c.check((chi @ chi - QMat.identity(rep.spinor_dim)).is_zero(), f"chi^2 d={d}")
            c.check(all((chi @ g + g @ chi).is_zero() for g in gam), f"anticommute d={d}")
            c.check(all((chi @ gam[a] @ gam[b] - gam[a] @ gam[b] @ chi).is_zero()
                        for a in range(d) for b in range(a + 1, d)), f"Gamma^ab d={d}")
        table = {d: minimal_real_dimension(gamma_rep(d)) for d in range(4, 12)}
        c.check(all(table[d] == expected_real_dimension(d) for d in table), f"table {table}")
        c.note("2x300 trials exact; chirality d=4,6,8,10; table d=4..11 " +
               ",".join(str(table[d]) for d in range(4, 12)))


def test_criterion_04_variation():
    from sugracheck.identities import rand_exact_metric
    from sugracheck.multivec import Form
    from sugracheck.variation import form_variation_check, metric_variation_check, random_poly_form
    with Criterion(4, "metric and form variations") as c:
        rng = np.random.default_rng(4)
        worst = 0.0
        for n, k in ((4, 1), (4, 2), (10, 3), (11, 4), (11, 2)):
            A = rng.normal(size=(n, n)) * 0.1
            g = (np.eye(n) + A).T @ np.diag([-1.0] + [1.0] * (n - 1)) @ (np.eye(n) + A)
            combos = list(combinations(range(n), k))
            G = Form(n, k, {combos[i]: float(rng.normal())
                            for i in rng.choice(len(combos), min(6, len(combos)), replace=False)})
            for entry in ((0, 0), (1, 2), (0, n - 1), (n - 1, n - 1)):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    rep = metric_variation_check(G, g, entry, step=1e-5)
                worst = max(worst, max(rep.rel_error.values()))
        c.check(worst < 1e-6, f"metric variation relative error {worst:.2e}")
        r = random.Random(4)
        for n in (4, 10, 11):
            for k in (1, 2, 3):
                gq = rand_exact_metric(r, n, nentries=2)
                rep = form_variation_check(random_poly_form(n, k, r, ncomps=2),
                                           random_poly_form(n, k, r, ncomps=2), gq)
                c.check(rep.passed, f"form variation n={n} k={k}")
        c.note(f"metric rel err {worst:.1e}; form identities exact for k=1,2,3 in dims 4,10,11")


def test_criterion_05_eleven_dimensional():
    from sugracheck.eom11 import background11, freund_rubin11, minkowski11, residuals_11
    from sugracheck.fields import AnalyticGeometry, freund_rubin_flux, pair_matrix
    with Criterion(5, "eleven-dimensional equations on flat and Freund-Rubin") as c:
        flat = residuals_11(minkowski11())
        c.check(all(v == 0.0 for v in flat.residuals.values()), f"flat {flat.residuals}")
        fr = residuals_11(freund_rubin11(1.0))
        worst = max(fr.residuals.values())
        c.check(worst < 1e-8, f"Freund-Rubin worst {worst:.2e}")
        _, G2 = pair_matrix(freund_rubin_flux(1.0))
        R = freund_rubin11(1.0).geometry.scalar()
        c.check(abs(R - G2 / 6) < 1e-12, f"R = {R}, |G|^2/6 = {G2 / 6}")
        anom = residuals_11(background11(geometry=AnalyticGeometry([(11, 0.0)]), beta=1.0),
                            anomaly=True)
        c.check(anom.residuals == flat.residuals, "anomaly flag changed flat residuals")
        c.note(f"flat exactly 0; FR worst {worst:.1e}; R = |G|^2/6 = {R:.6f}")


def test_criterion_06_killing_equivalences():
    from sugracheck.clifford import real_structure
    from sugracheck.eom11 import minkowski11
    from sugracheck.identities import rand_form, rand_vector
    from sugracheck.killing import (FieldData, formulation_gap, gamma_rep, gravitino11_forms,
                                    gravitino11_operator, susy_kernel)
    with Criterion(6, "Killing operator equivalences and flat count") as c:
        r = random.Random(6)
        bad3 = badb = 0
        for _ in range(100):
            f = gravitino11_forms(rand_form(r, 11, 4, 5), rand_vector(r, 11, 4))
            bad3 += not (f["interior"] == f["left"] and f["left"] == f["sandwich"])
            fd = FieldData(10, {"H3": rand_form(r, 10, 3, 3), "G1": rand_form(r, 10, 1, 2),
                                "G3": rand_form(r, 10, 3, 3), "G5": rand_form(r, 10, 5, 3)},
                           ephi=Fraction(r.randint(1, 5), r.randint(1, 3)),
                           dphi=rand_vector(r, 10, 3))
            badb += any(v != 0 for v in formulation_gap(fd, rand_vector(r, 10, 3)).values())
        c.check(bad3 == 0, f"three gravitino forms differ {bad3}/100")
        c.check(badb == 0, f"IIB formulations differ {badb}/100")
        ops = [gravitino11_operator(minkowski11(), a).matrix for a in range(11)]
        count = susy_kernel(ops, real_structure(gamma_rep(11)), exact=True).dim
        c.check(count == 32, f"flat count {count}")
        c.note(f"100/100 and 100/100 exact; flat supersymmetry count {count}")


def test_criterion_07_internal_consistency():
    from sugracheck.eomiia import background_iia, residuals_iia
    from sugracheck.eomiia import field_strengths as fs_a, gauge_transform as gt_a
    from sugracheck.eomiib import background_iib, residuals_iib
    from sugracheck.eomiib import field_strengths as fs_b, gauge_transform as gt_b
    from sugracheck.variation import random_poly_form
    with Criterion(7, "IIA/IIB trace identity, simplified variant, gauge invariance") as c:
        worst_t = worst_v = 0.0
        for seed in range(2):
            a = background_iia(patch=wavy_patch(seed=seed), phi=poly_dilaton(seed=seed),
                               **poly_forms({"H3": 3, "G2": 2, "G4": 4}, seed=seed))
            b = background_iib(patch=wavy_patch(seed=seed), phi=poly_dilaton(seed=seed), C0=0.3,
                               **poly_forms({"H3": 3, "G1": 1, "G3": 3, "G5": 5}, seed=seed))
            for rep in (residuals_iia(a, [POINT]), residuals_iib(b, [POINT])):
                worst_t = max(worst_t, rep.residuals["trace_identity"])
                worst_v = max(worst_v, rep.residuals["variant_difference"])
        c.check(worst_t < 1e-10, f"trace identity {worst_t:.2e}")
        c.check(worst_v < 1e-10, f"variant difference {worst_v:.2e}")
        r = random.Random(7)
        for _ in range(5):
            pots = [random_poly_form(10, k, r, ncomps=3) for k in (2, 1, 3)]
            params = [random_poly_form(10, k, r, ncomps=2) for k in (1, 0, 2)]
            c.check(all(x == y for x, y in zip(fs_a(*pots), fs_a(*gt_a(*pots, *params)))),
                    "IIA gauge invariance")
            pots = [random_poly_form(10, k, r, ncomps=3) for k in (2, 0, 2, 4)]
            params = [random_poly_form(10, k, r, ncomps=2) for k in (1, 1, 3)]
            c.check(all(x == y for x, y in zip(fs_b(*pots), fs_b(*gt_b(*pots, *params)))),
                    "IIB gauge invariance")
        c.note(f"trace {worst_t:.1e}; variant {worst_v:.1e}; gauge invariance exact 5+5")


def test_criterion_08_frame_conversion():
    from sugracheck.eomiia import background_iia, frame_relations
    with Criterion(8, "string/Einstein conformal relations") as c:
        bg = background_iia(patch=wavy_patch(seed=8), phi=poly_dilaton(seed=8),
                            **poly_forms({"H3": 3, "G2": 2, "G4": 4}, seed=8))
        rep = frame_relations(bg, [POINT, POINT * -1.5])
        for k in ("dvol", "norm", "hodge"):
            c.check(rep[k] < 1e-12, f"{k} {rep[k]:.2e}")
        c.check(rep["scalar_curvature"] < 1e-5, f"R_E {rep['scalar_curvature']:.2e}")
        c.note(", ".join(f"{k} {v:.1e}" for k, v in rep.items()))


def test_criterion_09_symmetric_notation():
    from sugracheck.eomiib import (compose, kinetic_terms, lagrangian_density, mobius,
                                   sl2_transform, symmetric_fields_at)
    from sugracheck.fields import pair_matrix
    from sugracheck.identities import rand_q, rand_sl2
    from sugracheck.multivec import Form
    with Criterion(9, "IIB symmetric notation and SL(2,R)") as c:
        rng = np.random.default_rng(9)
        r = random.Random(9)

        def fform(k, m=4):
            combos = list(combinations(range(10), k))
            return Form(10, k, {combos[i]: float(rng.normal())
                                for i in rng.choice(len(combos), m, replace=False)})
        worst_id = worst_inv = 0.0
        for trial in range(50):
            phi, C0 = float(rng.normal()) * 0.5, float(rng.normal())
            dphi = rng.normal(size=10)
            H3, G1, G3t, G5 = fform(3), fform(1, 3), fform(3), fform(5)
            sf = symmetric_fields_at(phi, C0, dphi, H3, G1, G3t, G5)
            kin, flux = kinetic_terms(sf)
            eta = np.array([-1.0] + [1.0] * 9)
            e2 = math.exp(2 * phi) * pair_matrix(G1)[1] / 2 + float(np.sum(eta * dphi ** 2)) / 2
            f2 = (math.exp(-phi) * pair_matrix(H3)[1] + math.exp(phi) * pair_matrix(G3t)[1]) / 2
            worst_id = max(worst_id, abs(kin - e2) / max(1, abs(e2)),
                           abs(flux - f2) / max(1, abs(f2)))
            L = rand_sl2(r, exact=False)
            before, after = lagrangian_density(sf), lagrangian_density(sl2_transform(sf, L))
            scale = max(1.0, max(abs(v) for v in before.values()))
            worst_inv = max(worst_inv, max(abs(after[k] - before[k]) for k in before) / scale)
        c.check(worst_id < 1e-12, f"proof identities {worst_id:.2e}")
        c.check(worst_inv < 1e-10, f"Lagrangian invariance {worst_inv:.2e}")
        bad = 0
        for _ in range(50):
            A, B = rand_sl2(r), rand_sl2(r)
            tau = (rand_q(r), Fraction(r.randint(1, 5), r.randint(1, 4)))
            bad += mobius(compose(A, B), tau) != mobius(A, mobius(B, tau))
        c.check(bad == 0, f"group law fails {bad}/50")
        c.note(f"identities {worst_id:.1e}; invariance over 50 Lambda {worst_inv:.1e}; "
               "group law exact 50/50")


def test_criterion_10_reduction():
    from sugracheck.eomiia import background_iia
    from sugracheck.identities import rand_exact_metric, rand_vector
    from sugracheck.multivec import _det_exact
    from sugracheck.poly import Poly
    from sugracheck.reduction import (block_metric, build_gm, chern_simons_check,
                                      connection_reduction_check, field_strength_reduce,
                                      killing_reduction_check, lagrangian_reduction_check,
                                      random_killing_data)
    from sugracheck.variation import random_poly_form
    with Criterion(10, "circle reduction dictionary") as c:
        r = random.Random(10)
        pots = {k: random_poly_form(10, d, r, ncomps=3)
                for k, d in (("C1", 1), ("B2", 2), ("C3", 3))}
        phi = Poly(10, {(1,) + (0,) * 9: Fraction(1, 5), (0, 2) + (0,) * 8: Fraction(1, 7),
                        (0,) * 10: Fraction(1, 10)})
        base = background_iia(patch=wavy_patch(seed=10, step=1e-4), phi=phi, potentials=pots)
        rd = build_gm(base)
        pts = [np.random.default_rng(10).uniform(-0.3, 0.3, 10)]
        conn = connection_reduction_check(rd, pts)
        koszul = max(conn.residuals.values())
        c.check(koszul < 1e-6, f"connection vs Koszul {koszul:.2e}")
        fsr = field_strength_reduce(rd, pts)
        c.check(fsr.passed, f"lifted field strength {fsr.residuals}")
        lag = lagrangian_reduction_check(rd, pts)
        rm = lag.residuals["scalar_curvature"]
        c.check(rm < 1e-4, f"R^M density {rm:.2e}")
        # exact volume relation: det g_M = u^-16 det g_N
        for _ in range(5):
            gN = rand_exact_metric(r, 10, nentries=3).components
            u = Fraction(r.randint(1, 4), r.randint(1, 3))
            gM = block_metric(gN, rand_vector(r, 10, 3), u)
            c.check(_det_exact(gM) == _det_exact(gN) / u ** 16, "exact dvol decomposition")
        for _ in range(5):
            out = chern_simons_check(*(random_poly_form(10, k, r, ncomps=2) for k in (1, 2, 3)))
            c.check(out["chern_simons"], "Chern-Simons split")
            c.check(out["field_strength"], "exact field-strength decomposition")
        nrng = np.random.default_rng(10)
        bad = 0
        for trial in range(25):
            bad += not all(killing_reduction_check(random_killing_data(nrng),
                                                   bbs=bool(trial % 2)).values())
        c.check(bad == 0, f"Killing reduction fails {bad}/25")
        c.note(f"Koszul {koszul:.1e}; R^M {rm:.1e}; dvol, G and Chern-Simons exact; "
               "Killing lift 25/25 exact")


def test_criterion_11_cli(capsys, tmp_path, monkeypatch):
    from sugracheck.cli import main
    with Criterion(11, "CLI golden reports and exit codes") as c:
        monkeypatch.delenv("SUGRACHECK_WORKERS", raising=False)
        golden = FIXTURES / "golden"
        for name in ("minkowski11", "freund_rubin"):
            for fmt, ext in (("json", "json"), ("table", "txt")):
                outs = []
                for _ in range(2):
                    code = main(["check", str(FIXTURES / f"{name}.json"), "--format", fmt])
                    outs.append(capsys.readouterr().out)
                    c.check(code == 0, f"{name} exit {code}")
                c.check(outs[0] == outs[1] == (golden / f"{name}.{ext}").read_text(),
                        f"{name}.{ext} differs from golden")
        code = main(["check", str(FIXTURES / "iia_polynomial.json")])
        c.check(code == 1, f"failing residual exit {code}")
        code = main(["check", str(FIXTURES / "bad_dim9.json")])
        c.check(code == 2, f"input error exit {code}")
        c.check("chart.dim" in capsys.readouterr().err, "input error names the field")
        bad = tmp_path / "bad.json"
        bad.write_text("{ not json")
        c.check(main(["check", str(bad)]) == 2, "malformed JSON exit")
        c.note("4 golden reports byte-stable; exit codes 0/1/2")


def summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
