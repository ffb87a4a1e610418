"""Type IIA field equations (string and Einstein frame) as residuals.

Field names in a background: ``H3``, ``G2`` and ``G4`` (the latter is the
corrected field strength G4 - C1 ^ H3). The dilaton is ``bg.phi``.
"""

import math

import numpy as np

from .fields import (AnalyticGeometry, Background, BackgroundError, Block, ResidualReport,
                     _scalar_callable, combine, form_residual, pair_matrix, safe_wedge)
from .multivec import Form, wedge
from .patchcalc import FramePatch, conformal_rescale, d_poly

FIELDS = ("H3", "G2", "G4")
EINSTEIN_EXPONENT = -0.5   # g_E = e^{-phi/2} g

STRING_EQUATIONS = ("einstein", "einstein_ricci_form", "einstein_ricci_simplified", "dilaton",
                    "maxwell_G2", "maxwell_G4", "maxwell_H3", "bianchi_H3", "bianchi_G2",
                    "bianchi_G4", "scalarR", "trace_identity", "variant_difference")
EINSTEIN_EQUATIONS = ("einstein", "einstein_ricci_form", "dilaton", "maxwell_G2", "maxwell_G4",
                      "maxwell_H3", "bianchi_H3", "bianchi_G2", "bianchi_G4", "scalarR",
                      "trace_identity")


def field_strengths(B2, C1, C3):
    """(H3, G2, G4~) from polynomial potentials, exactly."""
    H3 = d_poly(B2)
    G2 = d_poly(C1)
    G4 = d_poly(C3) - wedge(C1, H3)
    return H3, G2, G4


def gauge_transform(B2, C1, C3, zeta1, Lambda0, Lambda2):
    """B2 + d zeta1, C1 + d Lambda0, C3 + d Lambda2 + H3 Lambda0."""
    H3 = d_poly(B2)
    return (B2 + d_poly(zeta1), C1 + d_poly(Lambda0),
            C3 + d_poly(Lambda2) + wedge(H3, Lambda0))


def background_iia(patch=None, geometry=None, phi=None, H3=None, G2=None, G4=None,
                   frame_tag="string", potentials=None, kappa=None):
    """IIA background from field strengths or from polynomial potentials.

    ``potentials`` = {"B2", "C1", "C3"} (missing ones are zero) overrides the
    field strengths, which are then computed exactly.
    """
    if frame_tag not in ("string", "einstein"):
        raise BackgroundError(f"unknown frame tag {frame_tag!r}")
    n = 10
    if potentials:
        z = {1: Form(n, 1), 2: Form(n, 2), 3: Form(n, 3)}
        B2 = potentials.get("B2", z[2])
        C1 = potentials.get("C1", z[1])
        C3 = potentials.get("C3", z[3])
        H3, G2, G4 = field_strengths(B2, C1, C3)
    forms = {"H3": H3 if H3 is not None else Form(n, 3),
             "G2": G2 if G2 is not None else Form(n, 2),
             "G4": G4 if G4 is not None else Form(n, 4)}
    if geometry is not None and phi is None:
        phi = 0.0
    return Background("iia-" + frame_tag, n, patch=patch, geometry=geometry, forms=forms,
                      phi=phi, frame_tag=frame_tag, constants={"kappa": kappa},
                      potentials=potentials)


def minkowski_iia(phi=0.0, frame_tag="string"):
    return background_iia(geometry=AnalyticGeometry([Block(10, 0.0)]), phi=phi,
                          frame_tag=frame_tag)


def _sym_max(M):
    iu = np.triu_indices(M.shape[0])
    return float(np.max(np.abs(M[iu])))


def _einstein_parts(jet):
    out = {}
    for name in FIELDS:
        out[name] = pair_matrix(jet.forms[name])
    return out


def point_residuals_string(jet):
    """Residual values of the string-frame equations at one jet."""
    eta = jet.eta
    e2 = math.exp(2 * jet.phi)
    (TH, H2), (T2, G22), (T4, G42) = (_einstein_parts(jet)[k] for k in FIELDS)
    H, G2, G4 = (jet.forms[k] for k in FIELDS)
    lap, dp2, Hphi = jet.lap, jet.dphi_sq(), jet.hess
    ric, R = jet.ricci, jet.scalar

    rhs_e = (-2 * Hphi + 2 * (lap - dp2) * eta
             + 0.5 * (TH - 0.5 * eta * H2)
             + 0.5 * e2 * (T2 - 0.5 * eta * G22)
             + 0.5 * e2 * (T4 - 0.5 * eta * G42))
    rhs_r = (-2 * Hphi - 0.25 * (lap - 2 * dp2) * eta
             + 0.5 * (TH - 0.25 * eta * H2)
             + 0.5 * e2 * (T2 - eta * G22 / 8)
             + 0.5 * e2 * (T4 - 3 * eta * G42 / 8))
    rhs_s = (-2 * Hphi + 0.5 * TH
             + 0.5 * e2 * (T2 - 0.5 * eta * G22)
             + 0.5 * e2 * (T4 - 0.5 * eta * G42))
    einstein = ric - 0.5 * eta * R - rhs_e
    res_r = ric - rhs_r
    res_s = ric - rhs_s
    dil = lap - (2 * dp2 - 0.5 * H2 + 0.75 * e2 * G22 + 0.25 * e2 * G42)
    trace_comb = R - (-4.5 * lap + 5 * dp2 + 0.25 * H2 + 3 / 8 * e2 * G22 + e2 * G42 / 8)
    scalarR = R - (-4 * dp2 + 2.5 * H2 - 3 * e2 * G22 - e2 * G42)

    m_g2 = combine(jet.dstar["G2"], -wedge(H, jet.star(G4)))
    m_g4 = combine(jet.dstar["G4"], safe_wedge(H, G4))
    m_h3 = combine(jet.d_weighted_star("H3", -2.0), _neg(safe_wedge(G4, G4), 0.5),
                   wedge(G2, jet.star(G4)))
    return {
        "einstein": _sym_max(einstein),
        "einstein_ricci_form": _sym_max(res_r),
        "einstein_ricci_simplified": _sym_max(res_s),
        "dilaton": abs(dil),
        "maxwell_G2": form_residual(m_g2),
        "maxwell_G4": form_residual(m_g4),
        "maxwell_H3": form_residual(m_h3),
        "bianchi_H3": form_residual(jet.d["H3"]),
        "bianchi_G2": form_residual(jet.d["G2"]),
        # G4~ = dC3 - C1^H3 forces dG4~ = -H3^G2
        "bianchi_G4": form_residual(combine(jet.d["G4"], wedge(H, G2))),
        "scalarR": abs(scalarR),
        "trace_identity": abs(np.trace(eta @ einstein) + 4 * trace_comb),
        "variant_difference": _sym_max(res_r - res_s - 0.25 * dil * eta),
    }


def point_residuals_einstein(jet):
    """Residual values of the Einstein-frame equations at one jet."""
    eta = jet.eta
    p = jet.phi
    em, e32, e12 = math.exp(-p), math.exp(1.5 * p), math.exp(0.5 * p)
    (TH, H2), (T2, G22), (T4, G42) = (_einstein_parts(jet)[k] for k in FIELDS)
    H, G2, G4 = (jet.forms[k] for k in FIELDS)
    dp = jet.dphi
    dp2 = jet.dphi_sq()
    DD = np.outer(dp, dp)
    ric, R = jet.ricci, jet.scalar

    rhs_e = (0.5 * (DD - 0.5 * eta * dp2)
             + 0.5 * em * (TH - 0.5 * eta * H2)
             + 0.5 * e32 * (T2 - 0.5 * eta * G22)
             + 0.5 * e12 * (T4 - 0.5 * eta * G42))
    rhs_r = (0.5 * DD
             + 0.5 * em * (TH - 0.25 * eta * H2)
             + 0.5 * e32 * (T2 - eta * G22 / 8)
             + 0.5 * e12 * (T4 - 3 * eta * G42 / 8))
    einstein = ric - 0.5 * eta * R - rhs_e
    dil = jet.lap - (-0.5 * em * H2 + 0.75 * e32 * G22 + 0.25 * e12 * G42)
    scalarR = R - (0.5 * dp2 + 0.25 * em * H2 + 3 / 8 * e32 * G22 + e12 * G42 / 8)

    m_g2 = combine(jet.d_weighted_star("G2", 1.5), -wedge(H, jet.star(G4)) * e12)
    m_g4 = combine(jet.d_weighted_star("G4", 0.5), safe_wedge(H, G4))
    m_h3 = combine(jet.d_weighted_star("H3", -1.0), _neg(safe_wedge(G4, G4), 0.5),
                   wedge(G2, jet.star(G4)) * e12)
    return {
        "einstein": _sym_max(einstein),
        "einstein_ricci_form": _sym_max(ric - rhs_r),
        "dilaton": abs(dil),
        "maxwell_G2": form_residual(m_g2),
        "maxwell_G4": form_residual(m_g4),
        "maxwell_H3": form_residual(m_h3),
        "bianchi_H3": form_residual(jet.d["H3"]),
        "bianchi_G2": form_residual(jet.d["G2"]),
        # G4~ = dC3 - C1^H3 forces dG4~ = -H3^G2
        "bianchi_G4": form_residual(combine(jet.d["G4"], wedge(H, G2))),
        "scalarR": abs(scalarR),
        "trace_identity": abs(np.trace(eta @ einstein) + 4 * scalarR),
    }


def _neg(F, c=1.0):
    return None if F is None else F * (-c)


def residuals_iia(bg, points=(None,), frame=None, tol=1e-8, tolerances=None):
    """Residual report for the IIA equations in the background's frame.

    Passing ``frame`` that disagrees with ``bg.frame_tag`` is an error: the
    Einstein-frame equations must be evaluated on an Einstein-frame metric.
    """
    if bg.dim != 10:
        raise BackgroundError(f"IIA equations need dim 10, got {bg.dim}")
    tag = bg.frame_tag
    if frame is not None and frame != tag:
        raise BackgroundError(f"{frame}-frame equations requested on a {tag}-frame background;"
                              " convert it with frame_convert_iia first")
    fn = point_residuals_string if tag == "string" else point_residuals_einstein
    rep = ResidualReport("iia-" + tag, tol, tolerances=dict(tolerances or {}))
    if bg.patch is not None and tolerances is None:
        rep.tolerance = max(tol, 1e-5)
    for k in ("trace_identity", "variant_difference"):
        rep.tolerances.setdefault(k, 1e-10)
    for i, x in enumerate(points):
        for k, v in fn(bg.jet(x)).items():
            rep.record(k, v, i)
    return rep


# ---------------------------------------------------------------------------
# frame conversion
# ---------------------------------------------------------------------------

def _rescaled_geometry(geo, scale):
    """Constant conformal factor g -> scale * g on an analytic geometry."""
    return AnalyticGeometry([Block(b.size, b.K / scale) for b in geo.blocks])


def frame_convert(bg, exponent):
    """Background with metric e^{exponent phi} g and unchanged forms and dilaton.

    Analytic (constant dilaton) backgrounds keep frame components consistent:
    a k-form component picks up e^{-exponent k phi / 2}.
    """
    new_tag = "einstein" if bg.frame_tag == "string" else "string"
    if bg.geometry is not None:
        p = float(bg.phi or 0.0)
        scale = math.exp(exponent * p)
        forms = {k: F * scale ** (-F.degree / 2) for k, F in bg.forms.items()}
        out = Background(bg.theory.split("-")[0] + "-" + new_tag, bg.dim,
                         geometry=_rescaled_geometry(bg.geometry, scale), forms=forms,
                         phi=bg.phi, frame_tag=new_tag, constants=bg.constants,
                         potentials=bg.potentials)
        return out
    patch = bg.patch
    phi = bg.phi
    f = _scalar_callable(phi) if phi is not None else (lambda y: 0.0)

    def phival(y):
        return float(f(np.asarray(y, dtype=float)))

    def metric(y):
        return math.exp(exponent * phival(y)) * patch.g(y)

    frame = None
    if patch._frame is not None:
        frame = lambda y: math.exp(-exponent * phival(y) / 2) * patch.frame(y)  # noqa: E731
    new_patch = FramePatch(metric, patch.dim, frame=frame, orientation=patch.orientation,
                           step=patch.step, domain=patch.domain)
    out = Background(bg.theory.split("-")[0] + "-" + new_tag, bg.dim, patch=new_patch,
                     forms={}, phi=phi, frame_tag=new_tag, constants=bg.constants,
                     potentials=bg.potentials)
    out.forms = dict(bg.forms)
    return out


def frame_convert_iia(bg):
    """String <-> Einstein frame: g_E = e^{-phi/2} g (inverse direction e^{+phi/2})."""
    c = EINSTEIN_EXPONENT if bg.frame_tag == "string" else -EINSTEIN_EXPONENT
    return frame_convert(bg, c)


def frame_relations(bg, points, forms=None):
    """Conformal relations (dvol, |F|^2, Hodge, R_E) for the string->Einstein map."""
    if bg.patch is None:
        raise BackgroundError("frame relations need a numeric patch")
    forms = list(bg.forms.values()) if forms is None else forms
    _, rep = conformal_rescale(bg.patch, bg.phi, points, EINSTEIN_EXPONENT, forms)
    return rep


def round_trip_error(bg, points):
    """max |g(convert(convert(bg))) - g(bg)| over points."""
    back = frame_convert_iia(frame_convert_iia(bg))
    if bg.geometry is not None:
        a = np.array([b.K for b in bg.geometry.blocks])
        b = np.array([b.K for b in back.geometry.blocks])
        return float(np.max(np.abs(a - b)))
    return max(float(np.max(np.abs(back.patch.g(x) - bg.patch.g(x)))) for x in points)
