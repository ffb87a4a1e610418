"""Exterior calculus and Lorentzian geometry on a coordinate patch.

Two representations are supported:

* exact: forms with :class:`~sugracheck.poly.Poly` coefficients and a constant
  :class:`~sugracheck.multivec.Metric`; d, wedge, Hodge and the Laplacian are
  then exact polynomial identities.
* numeric: fields are callables of the coordinate point; derivatives use
  fourth-order central differences (optionally Richardson-extrapolated).

Curvature conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
Ric(X,Y) = tr(Z -> R(Z,X)Y), omega_ab(X) = g(nabla_X e_a, e_b) and
R(X,Y) e_a = sum_b Omega_ab(X,Y) e_b.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .multivec import Form, Metric, MetricError, hodge_star, wedge, norm_sq, frame_components
from .poly import Poly

DEFAULT_STEP = 1e-4


class ReducedAccuracyWarning(UserWarning):
    """A stencil had to be shrunk to stay inside the chart domain."""


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def _fit_step(x, h, domain):
    if domain is None:
        return h
    lo, hi = domain
    room = min(min(xi - l, u - xi) for xi, l, u in zip(x, lo, hi))
    if room <= 0:
        raise ValueError("point lies outside the chart domain")
    if 2 * h > room:
        warnings.warn("stencil shrunk near chart boundary", ReducedAccuracyWarning)
        return room / 2.5
    return h


def _shift(x, mu, t):
    y = np.array(x, dtype=float)
    y[mu] += t
    return y


def _d1(f, x, mu, h):
    return (f(_shift(x, mu, -2 * h)) * (1 / 12) + f(_shift(x, mu, -h)) * (-8 / 12)
            + f(_shift(x, mu, h)) * (8 / 12) + f(_shift(x, mu, 2 * h)) * (-1 / 12)) * (1 / h)


def partial(f, x, mu, h=DEFAULT_STEP, richardson=False, domain=None):
    """Fourth-order central difference of f along coordinate mu."""
    h = _fit_step(x, h, domain)
    d = _d1(f, x, mu, h)
    if richardson:
        d2 = _d1(f, x, mu, h / 2)
        d = d2 * (16 / 15) + d * (-1 / 15)
    return d


def gradient(f, x, h=DEFAULT_STEP, richardson=False, domain=None):
    return [partial(f, x, mu, h, richardson, domain) for mu in range(len(x))]


def second_partials(f, x, h=DEFAULT_STEP, domain=None):
    """Table of d_mu d_nu f with fourth-order stencils (nested for mixed pairs)."""
    h = _fit_step(x, h, domain)
    n = len(x)
    f0 = f(np.asarray(x, dtype=float))
    out = [[None] * n for _ in range(n)]
    for mu in range(n):
        out[mu][mu] = (f(_shift(x, mu, -2 * h)) * (-1 / 12) + f(_shift(x, mu, -h)) * (16 / 12)
                       + f0 * (-30 / 12) + f(_shift(x, mu, h)) * (16 / 12)
                       + f(_shift(x, mu, 2 * h)) * (-1 / 12)) * (1 / h ** 2)
        for nu in range(mu):
            out[mu][nu] = out[nu][mu] = _d1(lambda y: _d1(f, y, nu, h), x, mu, h)
    return out


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------

def scalar_jet(phi, x, h=DEFAULT_STEP, domain=None):
    """(value, gradient, second-derivative matrix) of a scalar field at x.

    Polynomial fields are differentiated exactly; callables numerically.
    """
    n = len(x)
    if isinstance(phi, Poly):
        val = phi(x)
        grad = np.array([phi.diff(m)(x) for m in range(n)], dtype=float)
        hess = np.array([[phi.diff(m).diff(k)(x) for k in range(n)] for m in range(n)], dtype=float)
        return float(val), grad, hess
    if isinstance(phi, (int, float)):
        return float(phi), np.zeros(n), np.zeros((n, n))
    val = float(phi(np.asarray(x, dtype=float)))
    grad = np.array(gradient(phi, x, h, domain=domain), dtype=float)
    hess = np.array(second_partials(phi, x, h, domain), dtype=float)
    return val, grad, hess


# ---------------------------------------------------------------------------
# exterior derivative
# ---------------------------------------------------------------------------

def d_poly(F):
    """Exact exterior derivative of a form with polynomial coefficients."""
    n = F.dim
    out = Form(n, F.degree + 1)
    for I, c in F.coeffs.items():
        if not isinstance(c, Poly):
            continue
        for mu in range(n):
            if mu in I:
                continue
            dc = c.diff(mu)
            if dc:
                out = out + wedge(Form.basis(n, (mu,), dc), Form.basis(n, I, 1))
    return out


def exterior_derivative(F, x=None, h=DEFAULT_STEP, richardson=False, domain=None):
    """dF.

    ``F`` is either a Form with polynomial coefficients (exact result) or a
    callable returning a float Form (numeric result at ``x``).
    """
    if isinstance(F, Form):
        return d_poly(F)
    if x is None:
        raise ValueError("numeric exterior derivative needs a point")
    F0 = F(np.asarray(x, dtype=float))
    n = F0.dim
    out = Form(n, F0.degree + 1)
    for mu in range(n):
        dF = partial(F, x, mu, h, richardson, domain)
        out = out + wedge(Form.basis(n, (mu,), 1.0), dF)
    return out


def evaluate_form(F, x):
    """Evaluate a polynomial-coefficient form at a point (float coefficients)."""
    return F.map(lambda c: c(x) if isinstance(c, Poly) else c).map(float)


# ---------------------------------------------------------------------------
# frames and patches
# ---------------------------------------------------------------------------

def orthonormal_frame(g, orientation=1):
    """Lorentzian Gram-Schmidt on the coordinate basis; rows are e_a^mu.

    Requires d_0 to be timelike. The frame is a smooth function of g, which is
    what numeric connection coefficients need.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    E = np.zeros((n, n))
    eta = np.ones(n)
    eta[0] = -1.0
    for a in range(n):
        v = np.zeros(n)
        v[a] = 1.0
        for b in range(a):
            v = v - eta[b] * (E[b] @ g @ v) * E[b]
        nrm = v @ g @ v
        if nrm * eta[a] <= 0:
            raise MetricError("coordinate basis is not adapted to (-,+,...,+); supply a frame")
        E[a] = v / math.sqrt(abs(nrm))
    if orientation < 0:
        E[-1] = -E[-1]
    return E


@dataclass
class CurvatureData:
    christoffel: np.ndarray          # Gamma^rho_{mu nu}
    riemann: np.ndarray              # R^rho_{sigma mu nu}
    ricci: np.ndarray                # R_{mu nu}
    scalar: float
    frame: np.ndarray                # e_a^mu
    ricci_frame: np.ndarray          # Ric(e_a, e_b)
    connection_1forms: np.ndarray    # omega[c, a, b] = omega_ab(e_c)
    curvature_2forms: list = field(default_factory=list)  # Omega[a][b], frame 2-forms


class FramePatch:
    """Coordinate chart with metric evaluator, orthonormal frame and orientation.

    ``metric`` maps a point to the (n+1)x(n+1) matrix g_{mu nu}. ``frame``
    optionally maps a point to E with E[a, mu] = e_a^mu; by default a
    Gram-Schmidt frame is used.
    """

    def __init__(self, metric, dim, frame=None, orientation=1, step=DEFAULT_STEP, domain=None):
        self._metric = metric
        self.dim = dim
        self.orientation = orientation
        self.step = step
        self.domain = domain
        self._frame = frame

    def g(self, x):
        return np.asarray(self._metric(np.asarray(x, dtype=float)), dtype=float)

    def metric_at(self, x):
        return Metric(self.g(x), self.orientation)

    def frame(self, x):
        if self._frame is not None:
            return np.asarray(self._frame(np.asarray(x, dtype=float)), dtype=float)
        return orthonormal_frame(self.g(x), self.orientation)

    def coframe(self, x):
        """Rows alpha^a_mu with alpha^a(e_b) = delta^a_b."""
        return np.linalg.inv(self.frame(x)).T

    def check_frame(self, x, tol=1e-10):
        E = self.frame(x)
        eta = np.diag([-1.0] + [1.0] * (self.dim - 1))
        return float(np.max(np.abs(E @ self.g(x) @ E.T - eta))) < tol

    # geometry -----------------------------------------------------------
    def christoffel(self, x, dg=None):
        g = self.g(x)
        ginv = np.linalg.inv(g)
        if dg is None:
            dg = np.array(gradient(self.g, x, self.step, domain=self.domain))
        # dg[l, m, n] = d_l g_{mn};[s, m, n] = 1/2 (d_m g_{sn} + d_n g_{sm} - d_s g_{mn})
        lower = 0.5 * (np.einsum("msn->smn", dg) + np.einsum("nsm->smn", dg) - dg)
        return np.einsum("rs,smn->rmn", ginv, lower)

    def curvature(self, x):
        n = self.dim
        x = np.asarray(x, dtype=float)
        g = self.g(x)
        if abs(np.linalg.det(g)) < 1e-300:
            raise MetricError("singular metric at point")
        ginv = np.linalg.inv(g)
        dg = np.array(gradient(self.g, x, self.step, domain=self.domain))
        ddg = np.array(second_partials(self.g, x, self.step, self.domain))
        # Christoffel symbols and their derivatives
        lower = 0.5 * (np.einsum("msn->smn", dg) + np.einsum("nsm->smn", dg) - dg)
        Gam = np.einsum("rs,smn->rmn", ginv, lower)
        dlower = 0.5 * (np.einsum("lmsn->lsmn", ddg) + np.einsum("lnsm->lsmn", ddg)
                        - np.einsum("lsmn->lsmn", ddg))
        dginv = -np.einsum("ra,lab,bs->lrs", ginv, dg, ginv)
        dGam = np.einsum("lrs,smn->lrmn", dginv, lower) + np.einsum("rs,lsmn->lrmn", ginv, dlower)
        # R^r_{s m n} = d_m Gam^r_{n s} - d_n Gam^r_{m s} + Gam^r_{m l} Gam^l_{n s} - Gam^r_{n l} Gam^l_{m s}
        R = (np.einsum("mrns->rsmn", dGam) - np.einsum("nrms->rsmn", dGam)
             + np.einsum("rml,lns->rsmn", Gam, Gam) - np.einsum("rnl,lms->rsmn", Gam, Gam))
        ric = np.einsum("rmrn->mn", R)
        scal = float(np.einsum("mn,mn->", ginv, ric))
        E = self.frame(x)
        ric_frame = E @ ric @ E.T
        omega = self.connection_coefficients(x, Gam=Gam, E=E)
        A = np.linalg.inv(E).T  # coframe rows
        # Omega_ab(e_c, e_d) = alpha^b(R(e_c, e_d) e_a)
        Om = np.einsum("br,rsmn,as,cm,dn->abcd", A, R, E, E, E)
        omega2 = [[_two_form(Om[a, b]) for b in range(n)] for a in range(n)]
        return CurvatureData(Gam, R, ric, scal, E, ric_frame, omega, omega2)

    def connection_coefficients(self, x, Gam=None, E=None):
        """omega[c, a, b] = g(nabla_{e_c} e_a, e_b) from Christoffel symbols."""
        x = np.asarray(x, dtype=float)
        if Gam is None:
            Gam = self.christoffel(x)
        if E is None:
            E = self.frame(x)
        g = self.g(x)
        dE = np.array(gradient(self.frame, x, self.step, domain=self.domain))  # dE[m, a, nu]
        # nabla_{e_c} e_a = e_c^m (d_m e_a^nu + Gam^nu_{m l} e_a^l) d_nu
        cov = np.einsum("cm,man->can", E, dE) + np.einsum("cm,nml,al->can", E, Gam, E)
        return np.einsum("can,ns,bs->cab", cov, g, E)

    def lie_brackets(self, x):
        """br[a, b, nu] = [e_a, e_b]^nu."""
        E = self.frame(x)
        dE = np.array(gradient(self.frame, x, self.step, domain=self.domain))
        t = np.einsum("am,mbn->abn", E, dE)
        return t - t.transpose(1, 0, 2)

    def koszul_connection(self, x):
        """omega[c, a, b] from the Koszul formula with g(e_a, e_b) constant.

        2 g(nabla_X Y, Z) = g([X,Y],Z) - g([X,Z],Y) - g([Y,Z],X).
        """
        n = self.dim
        br = self.lie_brackets(x)
        A = np.linalg.inv(self.frame(x)).T
        eta = np.array([-1.0] + [1.0] * (n - 1))
        # c_[a,b,d] = g([e_a, e_b], e_d) = eta_d alpha^d([e_a, e_b])
        cst = np.einsum("dn,abn->abd", A, br) * eta[None, None, :]
        return 0.5 * (cst - cst.transpose(0, 2, 1) - np.einsum("abc->cab", cst))

    def volume_coefficient(self, x):
        return self.orientation * math.sqrt(abs(np.linalg.det(self.g(x))))


def _two_form(M):
    n = M.shape[0]
    return Form(n, 2, {(c, d): float(M[c, d]) for c in range(n) for d in range(c + 1, n)
                       if M[c, d] != 0})


def curvature(patch, x):
    return patch.curvature(x)


def frame_connection(patch, x):
    return patch.connection_coefficients(x)


def structure_equation_residual(patch, x):
    """max |d omega_ab - omega_ac ^ omega^c_b - Omega_ab| in frame components.

    The sign pattern follows omega_ab(X) = g(nabla_X e_a, e_b).
    """
    n = patch.dim
    x = np.asarray(x, dtype=float)
    cd = patch.curvature(x)
    E = cd.frame
    eta = np.array([-1.0] + [1.0] * (n - 1))

    def omega_coord(y):
        # coordinate components omega_ab(d_mu) = alpha^c_mu omega[c, a, b]
        om = patch.connection_coefficients(y)
        return np.einsum("cm,cab->mab", np.linalg.inv(patch.frame(y)).T, om)

    dom = np.array(gradient(omega_coord, x, patch.step, domain=patch.domain))  # dom[l, m, a, b]
    domega = dom - dom.transpose(1, 0, 2, 3)  # (d omega_ab)_{l m}
    om = omega_coord(x)
    wedge_term = (np.einsum("mac,ncb,c->mnab", om, om, eta)
                  - np.einsum("nac,mcb,c->mnab", om, om, eta))
    lhs = domega - wedge_term  # coordinate 2-form components
    lhs_frame = np.einsum("cm,dn,mnab->abcd", E, E, lhs)
    Om = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            for (c, d), v in cd.curvature_2forms[a][b].coeffs.items():
                Om[a, b, c, d] = v
                Om[a, b, d, c] = -v
    Om_low = Om * eta[None, :, None, None]
    return float(np.max(np.abs(lhs_frame - Om_low)))


# ---------------------------------------------------------------------------
# Laplacian and Hessian (sign: Delta (x0)^2 = -2 on Minkowski)
# ---------------------------------------------------------------------------

def laplacian(phi, patch, x=None):
    """Delta phi = |g|^{-1/2} d_mu(|g|^{1/2} g^{mu nu} d_nu phi).

    With a constant exact Metric and a polynomial phi the result is exact.
    """
    if isinstance(patch, Metric):
        return _laplacian_exact(phi, patch, x)
    x = np.asarray(x, dtype=float)

    def flux(y):
        g = patch.g(y)
        _, grad, _ = scalar_jet(phi, y, patch.step, patch.domain) if isinstance(phi, Poly) \
            else (None, np.array(gradient(phi, y, patch.step, domain=patch.domain)), None)
        return math.sqrt(abs(np.linalg.det(g))) * (np.linalg.inv(g) @ grad)

    div = sum(partial(lambda y, m=m: flux(y)[m], x, m, patch.step, domain=patch.domain)
              for m in range(patch.dim))
    return float(div / math.sqrt(abs(np.linalg.det(patch.g(x)))))


def _laplacian_exact(phi, g, x=None):
    n = g.dim
    out = Poly.const(n, 0) if isinstance(phi, Poly) else 0
    for m in range(n):
        for k in range(n):
            if g.inverse[m][k] != 0:
                out = out + g.inverse[m][k] * phi.diff(m).diff(k)
    return out if x is None else out(x)


def laplacian_dstar(phi, patch, x=None):
    """Second path: (d * d phi) / dvol."""
    if isinstance(patch, Metric):
        n = patch.dim
        dphi = d_poly(Form.scalar(n, phi))
        top = d_poly(hodge_star(dphi, patch))
        c = top.coeffs.get(tuple(range(n)), Poly.const(n, 0))
        val = c * (1 / (patch.orientation * patch.sqrt_det))
        return val if x is None else val(x)
    x = np.asarray(x, dtype=float)
    n = patch.dim

    def star_dphi(y):
        _, grad, _ = scalar_jet(phi, y, patch.step, patch.domain)
        df = Form(n, 1, {(m,): float(grad[m]) for m in range(n)})
        return hodge_star(df, patch.metric_at(y))

    top = exterior_derivative(star_dphi, x, patch.step, domain=patch.domain)
    return float(top.coeffs.get(tuple(range(n)), 0.0) / patch.volume_coefficient(x))


def hessian(phi, patch, x):
    """H_{mu nu} = d_mu d_nu phi - Gamma^l_{mu nu} d_l phi (coordinate components)."""
    if isinstance(patch, Metric):
        n = patch.dim
        return [[phi.diff(m).diff(k)(x) for k in range(n)] for m in range(n)]
    x = np.asarray(x, dtype=float)
    _, grad, hess = scalar_jet(phi, x, patch.step, patch.domain)
    Gam = patch.christoffel(x)
    return hess - np.einsum("lmn,l->mn", Gam, grad)


# ---------------------------------------------------------------------------
# conformal rescaling g_E = e^{c phi} g
# ---------------------------------------------------------------------------

def conformal_rescale(patch, phi, points, exponent=-0.5, forms=()):
    """Rescale g -> e^{exponent*phi} g and verify the conformal relations.

    Returns (rescaled patch, report) where the report holds the maximal
    residual over ``points`` for: the volume relation, the norm relation for
    every form in ``forms`` (callables of the point), the Hodge relation and
    the scalar-curvature relation
    R_E = e^{-c phi}(R - (N-1) c Delta phi - (N-1)(N-2) c^2/4 |d phi|^2).
    For c = -1/2 and N = 10 this is e^{phi/2}(R + 9/2 Delta phi - 9/2 |d phi|^2).
    """
    c = exponent
    N = patch.dim

    def phival(y):
        return scalar_jet(phi, y, patch.step, patch.domain)[0] if isinstance(phi, Poly) \
            else float(phi(y))

    def gE(y):
        return math.exp(c * phival(y)) * patch.g(y)

    frame = None
    if patch._frame is not None:
        frame = lambda y: math.exp(-c * phival(y) / 2) * patch.frame(y)  # noqa: E731
    new = FramePatch(gE, N, frame=frame, orientation=patch.orientation, step=patch.step,
                     domain=patch.domain)
    report = {"dvol": 0.0, "norm": 0.0, "hodge": 0.0, "scalar_curvature": 0.0}
    for x in points:
        x = np.asarray(x, dtype=float)
        p, grad, _ = scalar_jet(phi, x, patch.step, patch.domain)
        g = patch.metric_at(x)
        gE_ = new.metric_at(x)
        dv = new.volume_coefficient(x) - math.exp(c * N * p / 2) * patch.volume_coefficient(x)
        report["dvol"] = max(report["dvol"], abs(dv))
        for F in forms:
            Fx = F(x)
            k = Fx.degree
            r = norm_sq(Fx, gE_) - math.exp(-c * k * p) * norm_sq(Fx, g)
            report["norm"] = max(report["norm"], abs(r))
            h = hodge_star(Fx, g) - math.exp(-c * (N - 2 * k) * p / 2) * hodge_star(Fx, gE_)
            report["hodge"] = max(report["hodge"], h.max_abs())
        R = patch.curvature(x).scalar
        RE = new.curvature(x).scalar
        lap = laplacian(phi, patch, x)
        dphi2 = float(grad @ np.linalg.inv(patch.g(x)) @ grad)
        pred = math.exp(-c * p) * (R - (N - 1) * c * lap - (N - 1) * (N - 2) * c * c / 4 * dphi2)
        report["scalar_curvature"] = max(report["scalar_curvature"], abs(RE - pred))
    return new, report


# ---------------------------------------------------------------------------
# Pontryagin forms
# ---------------------------------------------------------------------------

def _matmul_forms(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                if not A[i][k].coeffs or not B[k][j].coeffs:
                    continue
                t = wedge(A[i][k], B[k][j])
                acc = t if acc is None else acc + t
            if acc is None:
                acc = Form(A[0][0].dim, A[i][0].degree + B[0][j].degree)
            row.append(acc)
        out.append(row)
    return out


def _trace(A):
    acc = A[0][0]
    for i in range(1, len(A)):
        acc = acc + A[i][i]
    return acc


def trace_powers(Omega):
    """(tr Omega^2, tr Omega^4) for a matrix of 2-forms."""
    O2 = _matmul_forms(Omega, Omega)
    dim = Omega[0][0].dim
    t2 = _trace(O2)
    t4 = _trace(_matmul_forms(O2, O2)) if dim >= 8 else Form(dim, min(8, dim))
    return t2, t4


def pontryagin_forms(curv):
    """(p1, p2, X8) from the curvature 2-form matrix.

    p1 = -tr Omega^2 / (8 pi^2)
    p2 = -tr Omega^4 / (64 pi^4) + (tr Omega^2)^2 / (128 pi^4)
    X8 = (p1^2 - 4 p2) / 192
    """
    Omega = curv.curvature_2forms if isinstance(curv, CurvatureData) else curv
    dim = Omega[0][0].dim
    t2, t4 = trace_powers(Omega)
    t2 = t2.map(complex if any(isinstance(v, complex) for v in t2.coeffs.values()) else float)
    p1 = t2 * (-1 / (8 * math.pi ** 2))
    if dim < 8:
        return p1, None, None
    t4 = t4.map(float)
    t22 = wedge(t2, t2)
    p2 = t4 * (-1 / (64 * math.pi ** 4)) + t22 * (1 / (128 * math.pi ** 4))
    x8 = (wedge(p1, p1) - p2 * 4) * (1 / 192)
    return p1, p2, x8


def conjugate_curvature(Omega, A):
    """A Omega A^{-1} with A a numeric matrix (a change of frame)."""
    A = np.asarray(A, dtype=float)
    Ainv = np.linalg.inv(A)
    n = len(Omega)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = Form(Omega[0][0].dim, 2)
            for k in range(n):
                for m in range(n):
                    c = A[i, k] * Ainv[m, j]
                    if c != 0 and Omega[k][m].coeffs:
                        acc = acc + Omega[k][m] * float(c)
            row.append(acc)
        out.append(row)
    return out


# convenience ---------------------------------------------------------------

def minkowski_patch(dim):
    eta = np.diag([-1.0] + [1.0] * (dim - 1))
    return FramePatch(lambda x: eta, dim, frame=lambda x: np.eye(dim))


def numeric_form_field(F):
    """Wrap a polynomial-coefficient form as a callable returning float forms."""
    return lambda x: evaluate_form(F, x)


def frame_form(F, patch, x):
    """Frame components of a coordinate form at x."""
    return frame_components(F, patch.frame(x))
