"""Checks of the pointwise variation formulas for form actions.

Metric variations are finite differences in the inverse-metric entries;
form-potential variations are exact identities between polynomial top forms.
"""

import math
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .multivec import Form, Metric, hodge_star, wedge
from .patchcalc import d_poly

DEFAULT_STEP = 1e-5


class VariationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# metric variations
# ---------------------------------------------------------------------------

def _raise_all(A, ginv):
    for ax in range(A.ndim):
        A = np.moveaxis(np.tensordot(ginv, A, axes=([1], [ax])), 0, ax)
    return A


def form_norm_density(G, ginv):
    """|G|^2 sqrt|det g| with g = ginv^{-1} (coordinate components)."""
    ginv = np.asarray(ginv, dtype=float)
    vol = 1.0 / math.sqrt(abs(np.linalg.det(ginv)))
    if G is None or not G.coeffs:
        return 0.0
    A = G.to_dense(float)
    return float(np.sum(A * _raise_all(A, ginv)) / factorial(G.degree)) * vol


def volume_density(G, ginv):
    return 1.0 / math.sqrt(abs(np.linalg.det(np.asarray(ginv, dtype=float))))


@dataclass
class DensityFunctional:
    """Top-form coefficient as a function of the inverse metric at a point."""
    evaluator: object
    data: object = None

    def __call__(self, ginv):
        return self.evaluator(self.data, ginv)

    def derivative(self, ginv, entry, step):
        """Central difference along g^{mu nu} (both symmetric slots for mu != nu)."""
        mu, nu = entry
        E = np.zeros_like(ginv)
        E[mu, nu] = 1.0
        E[nu, mu] = 1.0
        return (self(ginv + step * E) - self(ginv - step * E)) / (2 * step)


def richardson(D, ginv, entry, step):
    """Three central differences at step, step/2, step/4 and their extrapolations."""
    d = [D.derivative(ginv, entry, step / 2 ** i) for i in range(3)]
    r1 = (4 * d[1] - d[0]) / 3
    r2 = (4 * d[2] - d[1]) / 3
    e1, e2 = abs(d[0] - d[1]), abs(d[1] - d[2])
    order = math.log2(e1 / e2) if e1 > 0 and e2 > 0 else None
    return d, r1, r2, order


def _pair(G, ginv, mu, nu):
    """<i_mu G, i_nu G> in coordinates."""
    k = G.degree
    A = G.to_dense(float)
    B = A
    for ax in range(1, k):
        B = np.moveaxis(np.tensordot(ginv, B, axes=([1], [ax])), 0, ax)
    return float(np.sum(A[mu] * B[nu]) / factorial(k - 1))


@dataclass
class VariationReport:
    entry: tuple
    numeric: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    rel_error: dict = field(default_factory=dict)
    order: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    tolerance: float = 1e-6

    @property
    def passed(self):
        return all(v <= self.tolerance for v in self.rel_error.values())

    def to_dict(self):
        return {"entry": list(self.entry), "numeric": self.numeric, "expected": self.expected,
                "rel_error": self.rel_error, "order": self.order, "warnings": self.warnings,
                "passed": self.passed}


def metric_variation_check(G, g, entry, step=DEFAULT_STEP, tol=1e-6):
    """Compare d(|G|^2 dvol)/dg^{mu nu} and d(dvol)/dg^{mu nu} with the closed forms.

    Closed forms: (<i_mu G, i_nu G> - 1/2 g_{mu nu} |G|^2) dvol and
    -1/2 g_{mu nu} dvol. For mu != nu the symmetric perturbation moves two
    entries, so the expected values are doubled.
    """
    gm = np.asarray(g.components if isinstance(g, Metric) else g, dtype=float)
    ginv = np.linalg.inv(gm)
    mu, nu = entry
    mult = 1.0 if mu == nu else 2.0
    vol = math.sqrt(abs(np.linalg.det(gm)))
    rep = VariationReport((mu, nu), tolerance=tol)
    if G is not None and G.coeffs:
        norm = form_norm_density(G, ginv) / vol
        pair = _pair(G, ginv, mu, nu)
    else:
        norm, pair = 0.0, 0.0
    expected = {
        "form_density": mult * (pair - 0.5 * gm[mu, nu] * norm) * vol,
        "volume": mult * (-0.5 * gm[mu, nu] * vol),
    }
    funcs = {"form_density": DensityFunctional(form_norm_density, G),
             "volume": DensityFunctional(volume_density, G)}
    for name, D in funcs.items():
        d, r1, r2, order = richardson(D, ginv, (mu, nu), step)
        scale = max(abs(expected[name]), vol * max(1.0, abs(norm)))
        rep.numeric[name] = float(r2)
        rep.expected[name] = float(expected[name])
        rep.rel_error[name] = float(abs(r2 - expected[name]) / scale)
        rep.order[name] = order
        if abs(r1 - r2) > tol * scale:
            msg = f"{name}: Richardson levels disagree ({r1} vs {r2}); step may be too large"
            rep.warnings.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return rep


def convergence_order(G, g, entry, step=1e-2):
    """Observed order of the plain central difference for the form density."""
    gm = np.asarray(g.components if isinstance(g, Metric) else g, dtype=float)
    D = DensityFunctional(form_norm_density, G)
    return richardson(D, np.linalg.inv(gm), entry, step)[3]


# ---------------------------------------------------------------------------
# form-potential variations
# ---------------------------------------------------------------------------

@dataclass
class FormVariationReport:
    degree: int
    dim: int
    terms: dict
    differences: dict
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(v for v in self.differences.values())

    def to_dict(self):
        return {"degree": self.degree, "dim": self.dim, "passed": self.passed,
                "identities": {k: bool(v) for k, v in self.differences.items()},
                "notes": self.notes}


def _sub_zero(a, b):
    return (a - b).is_zero()


def form_variation_check(C, deltaC, g):
    """Exact identity for the variation of G^*G with G = dC and constant g.

    Verifies, as polynomial top forms,
        d(dC')^*dC = d(dC'^*dC) - (-1)^k dC'^d*dC      (dC' := deltaC)
        d(dC')^*dC = dC^*d(dC')
    so that delta(G^*G) = 2 (-1)^(k+1) deltaC ^ d*G + total derivative.
    """
    if not isinstance(g, Metric) or not g.exact:
        raise VariationError("form variations need a constant metric with rational entries")
    if C.degree != deltaC.degree or C.dim != deltaC.dim or C.dim != g.dim:
        raise VariationError("C and deltaC must have the same degree and dimension")
    n, k = C.dim, C.degree
    G = d_poly(C)
    dG = d_poly(deltaC)
    starG = hodge_star(G, g)
    dstarG = d_poly(starG)
    lhs = wedge(dG, starG)
    boundary = d_poly(wedge(deltaC, starG))
    bulk = wedge(deltaC, dstarG)
    rhs = boundary - bulk if k % 2 == 0 else boundary + bulk
    sym = wedge(G, hodge_star(dG, g))
    notes = []
    if isinstance(g.sqrt_det, float):
        notes.append("sqrt|det g| is irrational; the identity is linear in it and is "
                     "checked with its float value as a rational")
    top = {"lhs": lhs, "total_derivative": boundary, "bulk": bulk, "symmetric": sym}
    return FormVariationReport(
        k, n, top,
        {"integration_by_parts": _sub_zero(lhs, rhs), "symmetry": _sub_zero(lhs, sym)},
        notes)


def random_poly_form(dim, degree, rng, max_poly_degree=2, nterms=3, ncomps=4):
    """Random polynomial form (rational coefficients) for property tests."""
    from itertools import combinations
    from .poly import Poly
    combos = list(combinations(range(dim), degree))
    idx = rng.sample(range(len(combos)), min(ncomps, len(combos)))
    return Form(dim, degree, {combos[i]: Poly.random(dim, max_poly_degree, rng, nterms)
                              for i in idx})
