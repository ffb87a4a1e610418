"""Bosonic field equations of eleven-dimensional supergravity as residuals.

Einstein:  Ric - 1/2 g R = 1/2 <i_X G, i_Y G> - 1/4 g |G|^2
Ricci:     Ric = 1/2 <i_X G, i_Y G> - 1/6 g |G|^2
Maxwell:   d*G + 1/2 G^G = -beta X8   (right side only with the anomaly term)
Bianchi:   dG = 0
Scalar:    R = |G|^2 / 6
"""

import math

import numpy as np

from .fields import (AnalyticGeometry, Background, BackgroundError, ResidualReport, combine,
                     form_residual, freund_rubin_flux, freund_rubin_geometry, pair_matrix,
                     safe_wedge)
from .patchcalc import conjugate_curvature, pontryagin_forms

EQUATIONS = ("einstein", "einstein_ricci_form", "maxwell", "bianchi", "scalar_curvature",
             "trace_bookkeeping")


def background11(patch=None, geometry=None, G=None, C=None, kappa=None, beta=0.0):
    """Eleven-dimensional background; ``G`` is the 4-form field strength."""
    forms = {} if G is None else {"G": G}
    bg = Background("m11", 11, patch=patch, geometry=geometry, forms=forms,
                    constants={"kappa": kappa, "beta": beta},
                    potentials={} if C is None else {"C": C})
    if "G" not in bg.forms:
        from .multivec import Form
        zero = Form(11, 4)
        bg.forms["G"] = zero if geometry is not None else (lambda x: zero)
    return bg


def minkowski11():
    return background11(geometry=AnalyticGeometry([(11, 0.0)]))


def freund_rubin11(f=1.0):
    return background11(geometry=freund_rubin_geometry(f), G=freund_rubin_flux(f))


def trace_reverse(S, n):
    """S -> S - 1/2 eta tr_eta S on symmetric frame tensors."""
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    return S - 0.5 * eta * np.trace(eta @ S)


def trace_reverse_inverse(T, n):
    """Inverse of :func:`trace_reverse` (valid for n != 2)."""
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    return T - eta * np.trace(eta @ T) / (n - 2)


def x8_form(Omega):
    return pontryagin_forms(Omega)[2]


def point_residuals_11(jet, anomaly=False, beta=0.0, sign_convention="paper"):
    """Residual values (max-abs) of every equation at one jet."""
    n = jet.dim
    if n != 11:
        raise BackgroundError(f"eleven-dimensional equations need dim 11, got {n}")
    eta = jet.eta
    G = jet.forms["G"]
    T, G2 = pair_matrix(G)
    ric, R = jet.ricci, jet.scalar
    einstein = ric - 0.5 * eta * R - (0.5 * T - 0.25 * eta * G2)
    ricci_form = ric - (0.5 * T - eta * G2 / 6.0)
    scalar = R - G2 / 6.0
    trace = np.trace(eta @ einstein) + 4.5 * scalar
    cs = 0.5 if sign_convention == "paper" else -0.5
    maxwell = combine(jet.dstar["G"], safe_wedge(G, G) * cs if G.coeffs else None)
    if anomaly:
        if jet.curvature_2forms is None:
            raise BackgroundError("anomaly term needs curvature 2-forms")
        x8 = x8_form(jet.curvature_2forms)
        maxwell = combine(maxwell, x8 * beta)
    iu = np.triu_indices(n)
    return {
        "einstein": float(np.max(np.abs(einstein[iu]))),
        "einstein_ricci_form": float(np.max(np.abs(ricci_form[iu]))),
        "maxwell": form_residual(maxwell),
        "bianchi": form_residual(jet.d["G"]),
        "scalar_curvature": abs(scalar),
        "trace_bookkeeping": abs(trace),
    }


def residuals_11(bg, points=(None,), anomaly=False, sign_convention="paper", tol=1e-8,
                 tolerances=None):
    """Residual report for the eleven-dimensional equations at ``points``.

    ``sign_convention="bbs"`` uses the action with the opposite Chern-Simons
    sign, whose Maxwell equation reads d*G = 1/2 G^G.
    """
    if bg.dim != 11:
        raise BackgroundError(f"eleven-dimensional equations need dim 11, got {bg.dim}")
    beta = float(bg.constants.get("beta") or 0.0)
    rep = ResidualReport("m11", tol, tolerances=dict(tolerances or {}))
    if bg.patch is not None and tolerances is None:
        # finite-difference curvature is accurate to ~1e-6
        rep.tolerance = max(tol, 1e-5)
    for i, x in enumerate(points):
        jet = bg.jet(x, with_curvature_forms=anomaly)
        for k, v in point_residuals_11(jet, anomaly, beta, sign_convention).items():
            rep.record(k, v, i)
    if anomaly:
        rep.notes.append(f"Maxwell equation includes -beta X8 with beta = {beta}")
    if sign_convention != "paper":
        rep.notes.append("alternate Chern-Simons sign: d*G = 1/2 G^G")
    return rep


def x8_check(bg, points=(None,), seed=0, tol=1e-12):
    """Anomaly-corrected Maxwell residual, frame invariance of X8, flatness test."""
    rng = np.random.default_rng(seed)
    beta = float(bg.constants.get("beta") or 0.0)
    rep = ResidualReport("m11-x8", tol)
    rep.tolerances["maxwell_anomaly"] = 1e-8 if bg.patch is None else 1e-5
    for i, x in enumerate(points):
        jet = bg.jet(x, with_curvature_forms=True)
        Om = jet.curvature_2forms
        x8 = x8_form(Om)
        res = point_residuals_11(jet, True, beta)
        rep.record("maxwell_anomaly", res["maxwell"], i)
        A = rng.normal(size=(11, 11)) + 3 * np.eye(11)
        x8c = x8_form(conjugate_curvature(Om, A))
        scale = max(1.0, x8.max_abs())
        rep.record("x8_frame_invariance", (x8c - x8).max_abs() / scale, i)
        flat = all(not Om[a][b].coeffs or Om[a][b].max_abs() == 0
                   for a in range(11) for b in range(11))
        rep.record("x8_flat", x8.max_abs() if flat else 0.0, i)
    return rep


def anomaly_constant(kappa):
    """beta = (4 pi kappa^2)^(2/3) when kappa is supplied."""
    return (4 * math.pi * kappa ** 2) ** (2.0 / 3.0)
