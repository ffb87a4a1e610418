"""Killing spinor operators as matrices on spinor space and pointwise susy counting.

A gravitino operator in direction X acts on frame-constant spinors as
(connection part) + (algebraic part), the connection part being
-1/4 omega_ab(X) Gamma^{ab}. Dilatino operators are purely algebraic.

With rational field data every matrix is an exact :class:`QMat`; otherwise
complex ndarrays are used.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clifford import (GammaRep, RealStructure, chirality_operator, clifford_matrix,
                       real_structure, spin_connection_matrix, vector_matrix)
from .gaussq import QMat, integer_rank, numeric_rank
from .multivec import Form, interior, wedge


class KillingError(ValueError):
    pass


# Pauli-type matrices acting on the IIB doublet index
LAMBDA1 = np.array([[0, 1], [1, 0]])
LAMBDA2 = np.array([[0, 1], [-1, 0]])
LAMBDA3 = np.array([[1, 0], [0, -1]])
LAMBDA0 = np.eye(2, dtype=int)

_REPS = {}


def gamma_rep(d):
    if d not in _REPS:
        _REPS[d] = GammaRep(d)
    return _REPS[d]


# ---------------------------------------------------------------------------
# exact / float arithmetic helpers
# ---------------------------------------------------------------------------

def _rational(c):
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


def _form_rational(F):
    return F is None or all(_rational(c) for c in F.coeffs.values())


def _scale(M, c):
    """c * M with c rational, a (re, im) pair of rationals, or a number."""
    if isinstance(M, QMat):
        return M * c
    if isinstance(c, tuple):
        c = complex(float(c[0]), float(c[1]))
    return complex(c) * np.asarray(M, dtype=complex)


def _sum(mats, N):
    mats = [m for m in mats if m is not None]
    if mats and all(isinstance(m, QMat) for m in mats):
        out = mats[0]
        for m in mats[1:]:
            out = out + m
        return out
    out = np.zeros((N, N), dtype=complex)
    for m in mats:
        out = out + np.asarray(m, dtype=complex)
    return out


def _mm(*mats):
    if all(isinstance(m, QMat) for m in mats):
        out = mats[0]
        for m in mats[1:]:
            out = out @ m
        return out
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = out @ np.asarray(m, dtype=complex)
    return out


def _kron(L, M):
    """L (small integer matrix) tensor M."""
    if isinstance(M, QMat):
        return QMat(np.kron(L, M.num), M.den)
    return np.kron(L, np.asarray(M, dtype=complex))


def _zero(N, exact):
    return QMat.zeros((N, N)) if exact else np.zeros((N, N), dtype=complex)


def as_array(M):
    return np.asarray(M.to_complex() if isinstance(M, QMat) else M, dtype=complex)


def matrices_equal(A, B, tol=0.0):
    """Exact equality for QMat pairs, max-abs comparison otherwise."""
    if isinstance(A, QMat) and isinstance(B, QMat):
        return (A - B).is_zero()
    return float(np.max(np.abs(as_array(A) - as_array(B)), initial=0.0)) <= tol


# ---------------------------------------------------------------------------
# field data at a point
# ---------------------------------------------------------------------------

@dataclass
class FieldData:
    """Frame components of the fields entering the Killing equations at one point.

    ``ephi`` is e^phi (kept separately so it can be rational), ``dphi`` the
    frame components of dphi and ``omega[c][a][b]`` = omega_ab(e_c).
    """
    dim: int
    forms: dict = field(default_factory=dict)
    ephi: object = 1
    dphi: object = None
    omega: object = None

    def form(self, name, degree):
        F = self.forms.get(name)
        return Form(self.dim, degree) if F is None else F

    def exact(self):
        vals = list(self.forms.values())
        ok = all(_form_rational(F) for F in vals) and _rational(self.ephi)
        if self.dphi is not None:
            ok = ok and all(_rational(c) for c in self.dphi)
        if self.omega is not None:
            ok = ok and all(_rational(c) for c in np.asarray(self.omega, dtype=object).ravel())
        return ok


def field_data(bg, point=None):
    """FieldData from a background (FieldData passes through unchanged)."""
    if isinstance(bg, FieldData):
        return bg
    jet = bg.jet(point)
    omega = None
    if bg.patch is not None:
        omega = bg.patch.curvature(np.asarray(point, dtype=float)).connection_1forms
    return FieldData(bg.dim, dict(jet.forms), ephi=float(np.exp(jet.phi)),
                     dphi=np.asarray(jet.dphi, dtype=float), omega=omega)


def _flat(X, n):
    eta = [-1] + [1] * (n - 1)
    return Form(n, 1, {(a,): eta[a] * X[a] for a in range(n) if X[a] != 0})


def _cm(F, rep, exact):
    if F is None or not F.coeffs:
        return _zero(rep.spinor_dim, exact)
    return clifford_matrix(F, rep, exact=exact)


def _vm(X, rep, exact):
    return vector_matrix(list(X), rep, exact=exact)


def _connection(fd, X, rep, exact):
    if fd.omega is None:
        return None
    om = np.asarray(fd.omega, dtype=object if exact else float)
    omega_X = sum(X[c] * om[c] for c in range(fd.dim) if X[c] != 0)
    if isinstance(omega_X, int):
        return None
    return spin_connection_matrix(omega_X, rep, exact=exact)


def _direction(X, n):
    if isinstance(X, (int, np.integer)):
        v = [0] * n
        v[int(X)] = 1
        return v
    X = list(X)
    if len(X) != n:
        raise KillingError(f"direction has {len(X)} components, expected {n}")
    return X


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass
class KillingOperator:
    """One Killing operator at a point.

    ``matrix`` is connection + algebraic part acting on frame-constant
    spinors. For the complex IIB formulation ``antilinear`` holds the matrix
    C of the term C eps*, with eps* = B conj(eps).
    """
    kind: str
    theory: str
    algebraic: object
    connection: object = None
    direction: object = None
    formulation: str = ""
    antilinear: object = None

    @property
    def matrix(self):
        if self.connection is None:
            return self.algebraic
        conn = self.connection
        if self.algebraic.shape != conn.shape:
            conn = _kron(LAMBDA0, conn)
        return _sum([self.algebraic, conn], self.algebraic.shape[0])

    @property
    def size(self):
        return self.algebraic.shape[0]


def gravitino11_forms(G, X, rep=None, exact=None):
    """The three algebraic parts of the eleven-dimensional gravitino operator.

    interior:  1/12 (X^G - 2 i_X G)
    left:      1/12 (X.(G.) - 3 (i_X G).)
    sandwich:  1/24 (3 G.(X.) - X.(G.))
    """
    rep = rep or gamma_rep(11)
    n = rep.d
    X = _direction(X, n)
    if exact is None:
        exact = _form_rational(G) and all(_rational(c) for c in X)
    iXG = interior(X, G)
    Gm = _cm(G, rep, exact)
    Xm = _vm(X, rep, exact)
    iXm = _cm(iXG, rep, exact)
    twelfth, half = Fraction(1, 12), Fraction(1, 24)
    N = rep.spinor_dim
    a = _scale(_sum([_cm(wedge(_flat(X, n), G), rep, exact), _scale(iXm, -2)], N), twelfth)
    b = _scale(_sum([_mm(Xm, Gm), _scale(iXm, -3)], N), twelfth)
    c = _scale(_sum([_scale(_mm(Gm, Xm), 3), _scale(_mm(Xm, Gm), -1)], N), half)
    return {"interior": a, "left": b, "sandwich": c}


def clifford_commutator_identity(G, X, rep=None):
    """(X.(G.) - G.(X.), 2 (i_X G).) for an even-degree form G."""
    rep = rep or gamma_rep(G.dim)
    X = _direction(X, rep.d)
    exact = _form_rational(G) and all(_rational(c) for c in X)
    Gm, Xm = _cm(G, rep, exact), _vm(X, rep, exact)
    lhs = _sum([_mm(Xm, Gm), _scale(_mm(Gm, Xm), -1)], rep.spinor_dim)
    return lhs, _scale(_cm(interior(X, G), rep, exact), 2)


def gravitino11_operator(bg, X, point=None, form="interior"):
    fd = field_data(bg, point)
    if fd.dim != 11:
        raise KillingError("eleven-dimensional operator needs dim 11")
    rep = gamma_rep(11)
    X = _direction(X, 11)
    exact = fd.exact() and all(_rational(c) for c in X)
    alg = gravitino11_forms(fd.form("G", 4), X, rep, exact)[form]
    return KillingOperator("gravitino", "m11", alg, _connection(fd, X, rep, exact), tuple(X))


def _gamma11(rep, exact):
    chi = chirality_operator(rep)
    return QMat(chi) if exact else chi


def iia_killing_operators(bg, X, point=None, g2_sign=1):
    """(gravitino in direction X, dilatino) for type IIA in string frame.

    ``g2_sign=-1`` flips G2 (the alternate C1 sign convention).
    """
    fd = field_data(bg, point)
    if fd.dim != 10:
        raise KillingError("IIA operators need dim 10")
    rep = gamma_rep(10)
    N = rep.spinor_dim
    X = _direction(X, 10)
    exact = fd.exact() and all(_rational(c) for c in X)
    G11 = _gamma11(rep, exact)
    H = fd.form("H3", 3)
    G2m = _scale(_cm(fd.form("G2", 2), rep, exact), g2_sign)
    G4m = _cm(fd.form("G4", 4), rep, exact)
    Hm = _cm(H, rep, exact)
    Xm = _vm(X, rep, exact)
    e = fd.ephi
    dphi = [0] * 10 if fd.dphi is None else list(fd.dphi)
    dm = _cm(Form(10, 1, {(a,): dphi[a] for a in range(10) if dphi[a] != 0}), rep, exact)
    q = Fraction
    grav = _sum([
        _scale(_mm(_cm(interior(X, H), rep, exact), G11), q(-1, 4)),
        _scale(_mm(G4m, Xm), q(1, 8) * e if exact else e / 8),
        _scale(_mm(G2m, Xm, G11), q(1, 8) * e if exact else e / 8),
    ], N)
    dil = _sum([
        _scale(G2m, q(1, 4) * e if exact else e / 4),
        _scale(_mm(dm, G11), q(-1, 3)),
        _scale(_mm(G4m, G11), q(1, 12) * e if exact else e / 12),
        _scale(Hm, q(1, 6)),
    ], N)
    return (KillingOperator("gravitino", "iia", grav, _connection(fd, X, rep, exact), tuple(X)),
            KillingOperator("dilatino", "iia", dil))


def _iib_pieces(fd, X, rep, exact):
    Xm = _vm(X, rep, exact)
    H = fd.form("H3", 3)
    dphi = [0] * 10 if fd.dphi is None else list(fd.dphi)
    return dict(
        X=Xm,
        iXH=_cm(interior(X, H), rep, exact),
        H=_cm(H, rep, exact),
        G1=_cm(fd.form("G1", 1), rep, exact),
        G3=_cm(fd.form("G3", 3), rep, exact),
        G5=_cm(fd.form("G5", 5), rep, exact),
        dphi=_cm(Form(10, 1, {(a,): dphi[a] for a in range(10) if dphi[a] != 0}), rep, exact),
    )


def iib_killing_operators(bg, X, point=None, formulation="doublet"):
    """(gravitino in direction X, dilatino) for type IIB in string frame.

    doublet: 64x64 matrices on (eps1, eps2) built from lambda_1 = sigma_1,
    lambda_2 = i sigma_2, lambda_3 = sigma_3.
    complex: eps_C = eps2 + i eps1; each operator is A eps_C + C eps_C*.
    """
    fd = field_data(bg, point)
    if fd.dim != 10:
        raise KillingError("IIB operators need dim 10")
    rep = gamma_rep(10)
    N = rep.spinor_dim
    X = _direction(X, 10)
    exact = fd.exact() and all(_rational(c) for c in X)
    p = _iib_pieces(fd, X, rep, exact)
    e = fd.ephi
    q = Fraction
    c8 = q(1, 8) * e if exact else e / 8
    conn = _connection(fd, X, rep, exact)
    G1X, G3X, G5X = _mm(p["G1"], p["X"]), _mm(p["G3"], p["X"]), _mm(p["G5"], p["X"])
    if formulation == "doublet":
        omt = _sum([_kron(LAMBDA2, G1X), _scale(_kron(LAMBDA1, G3X), -1),
                    _scale(_kron(LAMBDA2, G5X), q(1, 2))], 2 * N)
        grav = _sum([_scale(_kron(LAMBDA3, p["iXH"]), q(1, 4)), _scale(omt, c8)], 2 * N)
        om = _sum([_scale(_kron(LAMBDA1, p["G3"]), q(1, 2)), _scale(_kron(LAMBDA2, p["G1"]), -1)],
                  2 * N)
        dil = _sum([_kron(LAMBDA0, p["dphi"]), _scale(_kron(LAMBDA3, p["H"]), q(1, 2)),
                    _scale(om, e)], 2 * N)
        return (KillingOperator("gravitino", "iib", grav, conn, tuple(X), "doublet"),
                KillingOperator("dilatino", "iib", dil, formulation="doublet"))
    if formulation != "complex":
        raise KillingError(f"unknown formulation {formulation!r}")
    ic8 = (0, q(1, 8) * e) if exact else 1j * e / 8
    ie = (0, e) if exact else 1j * e
    A_g = _scale(_sum([G1X, _scale(G5X, q(1, 2))], N), ic8)
    C_g = _sum([_scale(p["iXH"], q(-1, 4)), _scale(_scale(G3X, ic8), -1)], N)
    A_d = _sum([p["dphi"], _scale(_scale(p["G1"], ie), -1)], N)
    C_d = _sum([_scale(p["H"], q(-1, 2)), _scale(_scale(p["G3"], ie), q(1, 2))], N)
    return (KillingOperator("gravitino", "iib", A_g, conn, tuple(X), "complex", C_g),
            KillingOperator("dilatino", "iib", A_d, formulation="complex", antilinear=C_d))


def complex_as_doublet(op):
    """N x 2N matrix of (eps1, eps2) -> A(eps2 + i eps1) + C(eps2 - i eps1)."""
    A, C = op.matrix, op.antilinear
    N = A.shape[0]
    if C is None:
        C = _zero(N, isinstance(A, QMat))
    left = _sum([_scale(A, (0, 1)), _scale(C, (0, -1))], N)
    right = _sum([A, C], N)
    return _hstack(left, right)


def doublet_combination(op):
    """N x 2N matrix of (eps1, eps2) -> E2 + i E1 for a doublet operator."""
    M = op.matrix
    N = M.shape[0] // 2
    blk = _blocks(M, N)
    left = _sum([blk[1][0], _scale(blk[0][0], (0, 1))], N)
    right = _sum([blk[1][1], _scale(blk[0][1], (0, 1))], N)
    return _hstack(left, right)


def _blocks(M, N):
    if isinstance(M, QMat):
        return [[QMat(M.num[i * N:(i + 1) * N, j * N:(j + 1) * N], M.den) for j in range(2)]
                for i in range(2)]
    return [[M[i * N:(i + 1) * N, j * N:(j + 1) * N] for j in range(2)] for i in range(2)]


def _hstack(a, b):
    if isinstance(a, QMat) and isinstance(b, QMat):
        L = a.den * b.den
        return QMat(np.hstack([a.num * (L // a.den), b.num * (L // b.den)]), L)
    return np.hstack([as_array(a), as_array(b)])


def formulation_gap(bg, X, point=None):
    """Compare the doublet and complex IIB formulations.

    Returns (exact_equal or max-abs difference) for gravitino and dilatino.
    """
    out = {}
    dbl = iib_killing_operators(bg, X, point, "doublet")
    cpx = iib_killing_operators(bg, X, point, "complex")
    for d, c in zip(dbl, cpx):
        a, b = complex_as_doublet(c), doublet_combination(d)
        if isinstance(a, QMat) and isinstance(b, QMat):
            out[d.kind] = 0.0 if (a - b).is_zero() else (a - b).max_abs()
        else:
            out[d.kind] = float(np.max(np.abs(as_array(a) - as_array(b))))
    return out


def apply_complex(op, psi, B):
    """A psi + C B conj(psi) for a complex-formulation operator."""
    out = as_array(op.matrix) @ psi
    if op.antilinear is not None:
        out = out + as_array(op.antilinear) @ (np.asarray(B) @ np.conj(psi))
    return out


# ---------------------------------------------------------------------------
# curvature / integrability
# ---------------------------------------------------------------------------

def spinor_curvature(Omega, c, d, rep):
    """-1/4 R_ab(e_c, e_d) Gamma^{ab} with R_ab = g(R(e_c,e_d) e_a, e_b).

    ``Omega[a][b]`` are the curvature 2-forms with R(X,Y) e_a = Omega_ab(X,Y) e_b.
    """
    n = rep.d
    eta = [-1] + [1] * (n - 1)
    low = [[0.0] * n for _ in range(n)]
    lo, hi, s = (c, d, 1) if c < d else (d, c, -1)
    for a in range(n):
        for b in range(n):
            F = Omega[a][b]
            v = F.coeffs.get((lo, hi), 0) if F is not None else 0
            low[a][b] = s * v * eta[b]
    return spin_connection_matrix(low, rep, exact=False)


def integrability_operator(Dc, Dd, curvature):
    """R^S(e_c, e_d) + [M_c, M_d] for algebraic parts that are parallel.

    Spinors annihilated by every D_X are annihilated by this matrix, so adding
    it to a kernel computation keeps the count an upper bound.
    """
    Mc, Md = as_array(Dc.algebraic if isinstance(Dc, KillingOperator) else Dc), \
        as_array(Dd.algebraic if isinstance(Dd, KillingOperator) else Dd)
    R = as_array(curvature)
    if R.shape != Mc.shape:
        R = np.kron(LAMBDA0, R)
    return R + Mc @ Md - Md @ Mc


# ---------------------------------------------------------------------------
# kernel counting
# ---------------------------------------------------------------------------

@dataclass
class KernelResult:
    dim: int
    basis: np.ndarray
    exact: bool
    upper_bound: bool = True
    note: str = "pointwise algebraic kernel: an upper bound on the number of supersymmetries"


def _structure_matrix(real_structure_, N):
    if isinstance(real_structure_, RealStructure):
        B = real_structure_.B
    else:
        B = np.asarray(real_structure_)
    B = np.asarray(B, dtype=complex)
    if B.shape[0] == N:
        return B
    if 2 * B.shape[0] == N:
        return np.kron(LAMBDA0, B)
    raise KillingError(f"real structure of size {B.shape[0]} does not fit operators of size {N}")


def _realify(M):
    M = np.asarray(M, dtype=complex)
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


def _sigma_real(B):
    return np.block([[B.real, B.imag], [B.imag, -B.real]])


def _op_parts(op):
    if isinstance(op, KillingOperator):
        return op.matrix, op.antilinear
    return op, None


def _exact_rows(M, C, S):
    """Integer rows of realify(M) + realify(C) sigma_R, scaled to clear denominators."""
    L = M.den if C is None else M.den * C.den
    R = QMat(M.num * (L // M.den), 1, _reduce=False).realified_integer()
    if C is not None:
        RC = QMat(C.num * (L // C.den), 1, _reduce=False).realified_integer()
        R = R + RC @ S
    return R


def susy_kernel(operators, real_structure_=None, exact=None, tol=1e-10):
    """Real dimension of the joint kernel inside the real-structure fixed space.

    Each operator is a KillingOperator or a square matrix. Complex IIB
    operators contribute A + C sigma as real-linear maps. Without operators
    the result is the dimension of the Majorana (or doublet) subspace.
    """
    ops = [_op_parts(o) for o in operators]
    if real_structure_ is None:
        if not ops:
            raise KillingError("need operators or a real structure")
        N0 = ops[0][0].shape[0]
        d = {32: 10, 64: 10}.get(N0)
        real_structure_ = real_structure(gamma_rep(d))
    B = np.asarray(real_structure_.B if isinstance(real_structure_, RealStructure)
                   else real_structure_, dtype=complex)
    N = ops[0][0].shape[0] if ops else B.shape[0]
    for M, C in ops:
        if M.shape != (N, N) or (C is not None and C.shape != (N, N)):
            raise KillingError("operators act on different spinor spaces")
    B = _structure_matrix(B, N)
    Bi = np.rint(B.real).astype(np.int64), np.rint(B.imag).astype(np.int64)
    b_integer = np.array_equal(Bi[0] + 1j * Bi[1], B)
    if exact is None:
        exact = b_integer and all(isinstance(M, QMat) and (C is None or isinstance(C, QMat))
                                  for M, C in ops)
    S = _sigma_real(B)
    fixed = S - np.eye(2 * N)
    rows_f = [fixed]
    for M, C in ops:
        R = _realify(as_array(M))
        if C is not None:
            R = R + _realify(as_array(C)) @ S
        rows_f.append(R)
    stack_f = np.vstack(rows_f)
    if exact:
        Sint = np.rint(S).astype(np.int64)
        rows = [Sint - np.eye(2 * N, dtype=np.int64)]
        for M, C in ops:
            M = M if isinstance(M, QMat) else QMat(np.asarray(M))
            rows.append(_exact_rows(M, C, Sint))
        Z = np.vstack(rows).astype(object)
        if Z.shape[0] > Z.shape[1]:
            Z = Z.T @ Z            # same rank over Q, smaller system
        rank = integer_rank(Z)
    else:
        rank = numeric_rank(stack_f, tol)
    dim = 2 * N - rank
    basis = np.zeros((0, N), dtype=complex)
    if dim:
        _, _, vt = np.linalg.svd(stack_f)
        v = vt[-dim:]
        basis = v[:, :N] + 1j * v[:, N:]
    return KernelResult(dim, basis, bool(exact))


def conjugate_operator(M, S):
    """S M S^-1 (exact when both are QMat and S is unimodular over Z[i])."""
    Sa = as_array(S)
    return Sa @ as_array(M) @ np.linalg.inv(Sa)


def conjugate_structure(B, S):
    """Conjugation matrix of S sigma S^-1, i.e. S B conj(S)^-1."""
    Sa = as_array(S)
    return Sa @ np.asarray(B) @ np.linalg.inv(np.conj(Sa))


def weyl_constraint(rep=None, doublet=False, chirality=1):
    """Operator whose kernel is the chirality `chirality` subspace (as a QMat)."""
    rep = rep or gamma_rep(10)
    chi = QMat(chirality_operator(rep))
    I = QMat.identity(rep.spinor_dim)
    P = I + chi if chirality == -1 else I - chi   # 2 P_(-chirality)
    return _kron(LAMBDA0, P) if doublet else P
