"""Backgrounds, per-point jets and residual reports shared by the equation modules.

A background is evaluated at a probe point into a :class:`PointJet`: every
quantity the field equations need, in components of an orthonormal frame.
The jet comes either from numeric differentiation on a :class:`FramePatch`
or from an analytic geometry (products of constant-curvature blocks with
parallel forms), so the residual formulas never see coordinates.
"""

from dataclasses import dataclass, field
from math import factorial
import math

import numpy as np

from .multivec import Form, Metric, hodge_star, wedge, frame_components
from .patchcalc import (exterior_derivative, hessian, numeric_form_field,
                        scalar_jet)
from .poly import Poly


class BackgroundError(ValueError):
    pass


# ---------------------------------------------------------------------------
# frame algebra
# ---------------------------------------------------------------------------

_ETA_CACHE = {}


def eta_metric(n, orientation=1):
    key = (n, orientation)
    if key not in _ETA_CACHE:
        _ETA_CACHE[key] = Metric(np.diag([-1.0] + [1.0] * (n - 1)), orientation)
    return _ETA_CACHE[key]


def _dense(F):
    cplx = any(isinstance(c, complex) for c in F.coeffs.values())
    return F.to_dense(dtype=complex if cplx else float)


def pair_matrix(F, G=None):
    """(T, s) with T_ab = <i_{e_a} F, i_{e_b} G> and s = <F, G> in a frame.

    Bilinear (no conjugation); pass ``G.map(np.conj)`` for hermitian pairings.
    """
    G = F if G is None else G
    n, k = F.dim, F.degree
    if k == 0:
        return np.zeros((n, n)), F.scalar_value() * G.scalar_value()
    A = _dense(F)
    B = _dense(G)
    eta = np.array([-1.0] + [1.0] * (n - 1))
    for slot in range(1, k):
        shape = [1] * k
        shape[slot] = n
        B = B * eta.reshape(shape)
    axes = list(range(1, k))
    T = np.tensordot(A, B, axes=(axes, axes)) / factorial(k - 1)
    s = np.sum(A * B * eta.reshape([n] + [1] * (k - 1))) / factorial(k)
    return T, s


def frame_norm(F):
    return pair_matrix(F)[1]


def frame_star(F, orientation=1):
    return hodge_star(F, eta_metric(F.dim, orientation))


def one_form(v):
    v = np.asarray(v)
    return Form(len(v), 1, {(a,): v[a] for a in range(len(v)) if v[a] != 0})


def top_coefficient(F):
    """Coefficient of alpha^0 ^ ... ^ alpha^n for a top form (0 if absent)."""
    return F.coeffs.get(tuple(range(F.dim)), 0.0)


def safe_wedge(F, G):
    """Wedge that returns None when the degree overflows (such terms vanish)."""
    if F.degree + G.degree > F.dim:
        return None
    return wedge(F, G)


# ---------------------------------------------------------------------------
# analytic geometries
# ---------------------------------------------------------------------------

@dataclass
class Block:
    """Constant sectional curvature K on a block of consecutive frame indices."""
    size: int
    K: float


class AnalyticGeometry:
    """Product of constant-curvature blocks; the first block carries e_0."""

    def __init__(self, blocks):
        self.blocks = [b if isinstance(b, Block) else Block(*b) for b in blocks]
        self.dim = sum(b.size for b in self.blocks)
        self.ranges = []
        start = 0
        for b in self.blocks:
            self.ranges.append(range(start, start + b.size))
            start += b.size

    def ricci(self):
        n = self.dim
        eta = np.array([-1.0] + [1.0] * (n - 1))
        R = np.zeros((n, n))
        for b, r in zip(self.blocks, self.ranges):
            for a in r:
                R[a, a] = (b.size - 1) * b.K * eta[a]
        return R

    def scalar(self):
        return float(sum(b.size * (b.size - 1) * b.K for b in self.blocks))

    def curvature_2forms(self):
        """Omega_ab = K eta_aa alpha^b ^ alpha^a pattern for R(X,Y)Z = K(g(Y,Z)X - g(X,Z)Y)."""
        n = self.dim
        eta = [-1.0] + [1.0] * (n - 1)
        Om = [[Form(n, 2) for _ in range(n)] for _ in range(n)]
        for b, r in zip(self.blocks, self.ranges):
            if b.K == 0:
                continue
            for a in r:
                for c in r:
                    if a != c:
                        # Omega_ac(e_x, e_y) = K (eta_ya delta^c_x - eta_xa delta^c_y)
                        Om[a][c] = Form(n, 2, {(c, a): b.K * eta[a]})
        return Om

    def check_parallel(self, F):
        """Forms must be sums of wedges of whole curved-block volume forms."""
        for I in F.coeffs:
            s = set(I)
            for b, r in zip(self.blocks, self.ranges):
                if b.K == 0:
                    continue
                hit = s.intersection(r)
                if hit and len(hit) != b.size:
                    raise BackgroundError(
                        f"form component {I} is not parallel on the curved block {list(r)}")


def freund_rubin_geometry(f):
    """AdS_4 x S^7 with Ric = -f^2/3 on the first factor and f^2/6 on the second."""
    return AnalyticGeometry([Block(4, -f * f / 9.0), Block(7, f * f / 36.0)])


def freund_rubin_flux(f):
    return Form(11, 4, {(0, 1, 2, 3): float(f)})


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

@dataclass
class PointJet:
    dim: int
    ricci: np.ndarray
    scalar: float
    forms: dict
    d: dict
    dstar: dict
    phi: float = 0.0
    dphi: np.ndarray = None
    hess: np.ndarray = None
    lap: float = 0.0
    curvature_2forms: list = None
    orientation: int = 1

    def __post_init__(self):
        n = self.dim
        if self.dphi is None:
            self.dphi = np.zeros(n)
        if self.hess is None:
            self.hess = np.zeros((n, n))

    @property
    def eta(self):
        return np.diag([-1.0] + [1.0] * (self.dim - 1))

    def star(self, F):
        return frame_star(F, self.orientation)

    def dphi_form(self):
        return one_form(self.dphi)

    def dphi_sq(self):
        return float(self.dphi @ self.eta @ self.dphi)

    def d_weighted_star(self, name, s):
        """Frame components of d(e^{s phi} * F) = e^{s phi}(s dphi ^ *F + d*F)."""
        F = self.forms[name]
        out = self.dstar[name]
        if s != 0:
            out = out + wedge(self.dphi_form(), self.star(F)) * s
        return out * math.exp(s * self.phi)


def _as_callable_form(F):
    if callable(F) and not isinstance(F, Form):
        return F
    if isinstance(F, Form):
        if any(isinstance(c, Poly) for c in F.coeffs.values()):
            return numeric_form_field(F)
        const = F.map(float)
        return lambda x: const
    raise BackgroundError(f"unsupported form field {F!r}")


def _scalar_callable(phi):
    if phi is None:
        return None
    if isinstance(phi, Poly) or callable(phi):
        return phi
    c = float(phi)
    return lambda x: c


class Background:
    """Field configuration of one theory on a patch or analytic geometry.

    ``forms`` maps field-strength names to polynomial forms, constant forms or
    callables returning coordinate-component forms (numeric mode), or to frame
    forms (analytic mode). ``frame_tag`` is ``"string"`` or ``"einstein"``
    for the ten-dimensional theories.
    """

    def __init__(self, theory, dim, patch=None, geometry=None, forms=None, phi=None,
                 frame_tag=None, constants=None, potentials=None, options=None):
        if (patch is None) == (geometry is None):
            raise BackgroundError("give exactly one of patch or geometry")
        self.theory = theory
        self.dim = dim
        self.patch = patch
        self.geometry = geometry
        self.frame_tag = frame_tag
        self.constants = dict(constants or {})
        self.potentials = dict(potentials or {})
        self.options = dict(options or {})
        self.phi = phi
        if geometry is not None:
            if geometry.dim != dim:
                raise BackgroundError(f"geometry dimension {geometry.dim} != {dim}")
            if phi is not None and not isinstance(phi, (int, float)):
                raise BackgroundError("analytic geometries need a constant dilaton")
            self.forms = {k: v.map(float) for k, v in (forms or {}).items()}
            for F in self.forms.values():
                geometry.check_parallel(F)
        else:
            if patch.dim != dim:
                raise BackgroundError(f"patch dimension {patch.dim} != {dim}")
            self.forms = {k: _as_callable_form(v) for k, v in (forms or {}).items()}

    # -----------------------------------------------------------------
    def jet(self, x=None, with_curvature_forms=False):
        if self.geometry is not None:
            return self._analytic_jet(with_curvature_forms)
        return self._numeric_jet(np.asarray(x, dtype=float), with_curvature_forms)

    def _analytic_jet(self, with_curvature_forms):
        geo = self.geometry
        n = self.dim
        zeros = {k: Form(n, min(F.degree + 1, n)) if F.degree < n else None
                 for k, F in self.forms.items()}
        dstar = {k: Form(n, n - F.degree + 1) if F.degree > 0 else None
                 for k, F in self.forms.items()}
        return PointJet(n, geo.ricci(), geo.scalar(), dict(self.forms), zeros, dstar,
                        phi=float(self.phi or 0.0), lap=0.0,
                        curvature_2forms=geo.curvature_2forms() if with_curvature_forms else None)

    def _numeric_jet(self, x, with_curvature_forms):
        patch = self.patch
        n = self.dim
        cd = patch.curvature(x)
        E = cd.frame
        orient = patch.orientation * (1 if np.linalg.det(E) > 0 else -1)
        forms, d, dstar = {}, {}, {}
        for name, F in self.forms.items():
            forms[name] = frame_components(F(x), E)
            deg = forms[name].degree
            d[name] = frame_components(
                exterior_derivative(F, x, patch.step, domain=patch.domain), E) if deg < n else None
            if deg > 0:
                star = (lambda y, F=F: hodge_star(F(y), patch.metric_at(y)))
                dstar[name] = frame_components(
                    exterior_derivative(star, x, patch.step, domain=patch.domain), E)
            else:
                dstar[name] = None
        phi = 0.0
        dphi = np.zeros(n)
        hess = np.zeros((n, n))
        lap = 0.0
        if self.phi is not None:
            f = _scalar_callable(self.phi)
            phi, grad, _ = scalar_jet(f, x, patch.step, patch.domain)
            dphi = E @ np.asarray(grad, dtype=float)
            hess = E @ np.asarray(hessian(f, patch, x), dtype=float) @ E.T
            eta = np.array([-1.0] + [1.0] * (n - 1))
            lap = float(np.sum(eta * np.diag(hess)))
        return PointJet(n, cd.ricci_frame, cd.scalar, forms, d, dstar, float(phi), dphi, hess,
                        lap, cd.curvature_2forms if with_curvature_forms else None, orient)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class ResidualReport:
    """Max-abs residual per equation over probe points (and frame pairs)."""
    theory: str
    tolerance: float = 1e-8
    residuals: dict = field(default_factory=dict)
    worst_point: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def record(self, name, value, point_index=0):
        value = float(abs(value))
        if name not in self.residuals or value > self.residuals[name]:
            self.residuals[name] = value
            self.worst_point[name] = point_index

    def tol(self, name):
        return self.tolerances.get(name, self.tolerance)

    def ok(self, name):
        return self.residuals[name] <= self.tol(name)

    @property
    def passed(self):
        return all(self.ok(k) for k in self.residuals)

    def failures(self):
        return [k for k in self.residuals if not self.ok(k)]

    def worst(self):
        """Name of the entry with the largest residual/tolerance ratio."""
        if not self.residuals:
            return None
        return max(self.residuals, key=lambda k: self.residuals[k] / self.tol(k))

    def to_dict(self):
        return {
            "theory": self.theory,
            "passed": self.passed,
            "residuals": {k: {"value": self.residuals[k], "tolerance": self.tol(k),
                              "pass": self.ok(k), "worst_point": self.worst_point[k]}
                          for k in self.residuals},
            "notes": list(self.notes),
        }


def form_residual(F):
    """max |component| of a residual form (None means identically zero)."""
    if F is None:
        return 0.0
    return F.max_abs()


def combine(*terms):
    """Sum of forms skipping Nones (degree-overflow terms)."""
    out = None
    for t in terms:
        if t is None:
            continue
        out = t if out is None else out + t
    return out
