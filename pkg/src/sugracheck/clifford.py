"""Clifford algebra representations for signature (n,1).

Gamma matrices satisfy Gamma_a Gamma_b + Gamma_b Gamma_a = 2 eta_ab Id and are
built by the tensor-product recursion from Pauli blocks, so every entry lies in
{0, +-1, +-i}. Forms act on spinors by
F . psi = sum_{a1<...<ak} F_{a1...ak} Gamma^{a1} ... Gamma^{ak} psi.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np

from .gaussq import QMat
from .multivec import Form

S0 = np.eye(2, dtype=complex)
S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)


class CliffordError(ValueError):
    pass


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def _euclidean_gammas(k):
    """2k anticommuting matrices squaring to Id on (C^2)^{tensor k}."""
    out = []
    for m in range(k):
        left = [S3] * m
        right = [S0] * (k - m - 1)
        out.append(_kron_all(left + [S1] + right))
        out.append(_kron_all(left + [S2] + right))
    return out


class GammaRep:
    """Concrete Clifford module for signature (d-1, 1)."""

    def __init__(self, d, odd_dim_sign=1):
        if not 2 <= d <= 12:
            raise CliffordError(f"unsupported dimension {d}")
        if odd_dim_sign not in (1, -1):
            raise CliffordError("odd_dim_sign must be +1 or -1")
        self.d = d
        self.odd_dim_sign = odd_dim_sign
        k = d // 2
        g = _euclidean_gammas(k)
        g[0] = 1j * g[0]
        if d % 2:
            prod = reduce(np.matmul, g)
            c = 1 if k % 2 else 1j
            last = c * prod
            g.append(last)
            target = odd_dim_sign * (1 if d % 4 == 3 else 1j)
            full = reduce(np.matmul, g)
            if not np.allclose(full, target * np.eye(full.shape[0])):
                g[-1] = -g[-1]
        self.gammas = g
        self.spinor_dim = g[0].shape[0]
        self.eta = np.array([-1] + [1] * (d - 1))
        self._up = [self.eta[a] * g[a] for a in range(d)]
        self._products = {(): np.eye(self.spinor_dim, dtype=complex)}

    # basic matrices -----------------------------------------------------
    def gamma(self, a):
        """Gamma_a (lower index)."""
        return self.gammas[a]

    def gamma_up(self, a):
        return self._up[a]

    def identity(self, exact=True):
        I = np.eye(self.spinor_dim, dtype=complex)
        return QMat(I) if exact else I

    def product(self, idx):
        """Gamma^{i1} ... Gamma^{ik} for a tuple of indices (cached for sorted tuples)."""
        idx = tuple(idx)
        P = self._products.get(idx)
        if P is None:
            P = self.product(idx[:-1]) @ self._up[idx[-1]]
            if len(idx) <= 6:
                self._products[idx] = P
        return P

    def qgamma(self, a, up=False):
        return QMat(self._up[a] if up else self.gammas[a])

    def full_product(self):
        """Gamma_0 Gamma_1 ... Gamma_{d-1} with lower indices."""
        return reduce(np.matmul, self.gammas)


def build_gamma_rep(d, odd_dim_sign=1):
    return GammaRep(d, odd_dim_sign)


def antisym_gamma(rep, indices, up=True):
    """Gamma^{a1...ak}: zero for repeated indices, the plain product otherwise."""
    indices = tuple(indices)
    if len(set(indices)) != len(indices):
        return np.zeros((rep.spinor_dim,) * 2, dtype=complex)
    mats = [rep.gamma_up(a) if up else rep.gamma(a) for a in indices]
    return reduce(np.matmul, mats, np.eye(rep.spinor_dim, dtype=complex))


def chirality_operator(rep):
    """Gamma_{n+2} = i^{1-k} Gamma_0 ... Gamma_n for d = 2k."""
    if rep.d % 2:
        raise CliffordError("chirality needs even dimension")
    k = rep.d // 2
    return (1j ** ((1 - k) % 4)) * rep.full_product()


def weyl_projectors(rep):
    chi = chirality_operator(rep)
    I = np.eye(rep.spinor_dim, dtype=complex)
    return 0.5 * (I + chi), 0.5 * (I - chi)


def weyl_split(rep, psi):
    Pp, Pm = weyl_projectors(rep)
    psi = np.asarray(psi)
    return Pp @ psi, Pm @ psi


def _exact_coeffs(F):
    return all(isinstance(c, (int, Fraction)) for c in F.coeffs.values())


def clifford_matrix(F, rep, exact=None):
    """Matrix of psi -> F . psi.

    Returns a :class:`QMat` when all coefficients are rational (or ``exact``
    is forced), a complex ndarray otherwise.
    """
    if F.dim != rep.d:
        raise CliffordError(f"form dimension {F.dim} does not match rep dimension {rep.d}")
    if exact is None:
        exact = _exact_coeffs(F)
    N = rep.spinor_dim
    if exact:
        coeffs = [(I, Fraction(c)) for I, c in F.coeffs.items()]
        L = 1
        for _, c in coeffs:
            L = L * c.denominator // gcd(L, c.denominator)
        num = np.zeros((N, N), dtype=complex)
        for I, c in coeffs:
            num += int(c * L) * rep.product(I)
        return QMat(num, L)
    out = np.zeros((N, N), dtype=complex)
    for I, c in F.coeffs.items():
        out += complex(c) * rep.product(I)
    return out


def clifford_action(F, psi, rep):
    """F . psi for a spinor column psi."""
    M = clifford_matrix(F, rep, exact=False if not isinstance(psi, QMat) else None)
    return M @ psi


def vector_matrix(X, rep, exact=None):
    """Clifford multiplication by a vector X = X^a e_a, i.e. X^a Gamma_a."""
    if exact is None:
        exact = all(isinstance(c, (int, Fraction)) for c in X)
    flat = Form(rep.d, 1, {(a,): rep.eta[a] * X[a] for a in range(rep.d)})
    return clifford_matrix(flat, rep, exact)


# ---------------------------------------------------------------------------
# real structures
# ---------------------------------------------------------------------------

@dataclass
class RealStructure:
    """sigma(psi) = B conj(psi); sigma^2 = +Id (majorana) or -Id (symplectic)."""
    kind: str
    B: np.ndarray
    sign: int                 # s in B conj(Gamma_a) = s Gamma_a B
    weyl_compatible: bool     # sigma preserves the chirality eigenspaces

    def apply(self, psi):
        return self.B @ np.conj(psi)

    def square(self):
        return self.B @ np.conj(self.B)

    def realified(self):
        """Real-linear matrix of sigma on R^{2N} = (Re psi, Im psi)."""
        Br, Bi = self.B.real, self.B.imag
        return np.block([[Br, Bi], [Bi, -Br]])


def _conj_signs(rep):
    signs = []
    for G in rep.gammas:
        if np.array_equal(np.conj(G), G):
            signs.append(1)
        elif np.array_equal(np.conj(G), -G):
            signs.append(-1)
        else:
            raise CliffordError("gamma matrix is neither real nor imaginary")
    return signs


def conjugation_candidates(rep):
    """All B = Gamma_I with B conj(Gamma_a) = s Gamma_a B for every a.

    In the Clifford basis the linear equations decouple (each basis element
    either commutes or anticommutes with each generator), so the solution
    space is spanned by the basis elements that satisfy all sign conditions.
    """
    d = rep.d
    c = _conj_signs(rep)
    out = []
    for mask in range(1 << d):
        I = [a for a in range(d) if mask >> a & 1]
        for s in (1, -1):
            if all((-1) ** (len(I) + (a in I)) == s * c[a] for a in range(d)):
                B = reduce(np.matmul, [rep.gamma(a) for a in I], np.eye(rep.spinor_dim, dtype=complex))
                out.append((tuple(I), s, B))
    return out


def real_structure(rep):
    """Pick the conjugation matrix following the d mod 8 classification."""
    chi = chirality_operator(rep) if rep.d % 2 == 0 else None
    best = None
    for I, s, B in conjugation_candidates(rep):
        sq = B @ np.conj(B)
        lam = sq[0, 0]
        if not np.allclose(sq, lam * np.eye(rep.spinor_dim)) or abs(abs(lam) - 1) > 1e-12:
            continue
        sq_sign = int(round(lam.real))
        for a in range(rep.d):
            if not np.array_equal(B @ np.conj(rep.gamma(a)), s * rep.gamma(a) @ B):
                raise CliffordError("conjugation candidate failed verification")
        weyl = chi is not None and np.array_equal(B @ np.conj(chi), chi @ B)
        # s = +1 makes sigma commute with every Clifford multiplication, so
        # operators mixing odd and even form degrees stay real
        key = (sq_sign == 1, weyl, s == 1, -len(I))
        if best is None or key > best[0]:
            best = (key, RealStructure("majorana" if sq_sign == 1 else "symplectic",
                                       B, s, bool(weyl)))
    if best is None:
        return RealStructure("none", np.zeros((rep.spinor_dim,) * 2), 0, False)
    return best[1]


def _integer_rank(M):
    from .gaussq import integer_rank
    return integer_rank(M)


def minimal_real_dimension(rep, rs=None):
    """Real dimension of the smallest real spinor module, counted from sigma.

    majorana: fixed space of sigma (intersected with S_+ when sigma preserves
    chirality); symplectic: fixed space of (psi1, psi2) -> (B conj psi2,
    -B conj psi1) on doublets (again restricted to S_+ when compatible).
    """
    rs = rs or real_structure(rep)
    N = rep.spinor_dim
    S = rs.realified()
    if rs.kind == "majorana":
        blocks = [S - np.eye(2 * N)]
        dim = 2 * N
        if rs.weyl_compatible:
            _, Pm = weyl_projectors(rep)
            blocks.append(2 * _realify(Pm))
    elif rs.kind == "symplectic":
        Z = np.zeros((2 * N, 2 * N))
        Sd = np.block([[Z, S], [-S, Z]])
        blocks = [Sd - np.eye(4 * N)]
        dim = 4 * N
        if rs.weyl_compatible:
            _, Pm = weyl_projectors(rep)
            R = 2 * _realify(Pm)
            blocks.append(np.block([[R, np.zeros_like(R)], [np.zeros_like(R), R]]))
    else:
        return 2 * N
    M = np.vstack(blocks)
    return dim - _integer_rank(np.rint(M).astype(np.int64))


def _realify(M):
    M = np.asarray(M)
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


STRUCTURE_TABLE = {
    0: ("majorana", False), 1: ("majorana", False), 2: ("majorana", True),
    3: ("majorana", False), 4: ("majorana", False), 5: ("symplectic", False),
    6: ("symplectic", True), 7: ("symplectic", False),
}


def expected_real_dimension(d):
    """2^{d/2}, 2^{(d-1)/2}, 2^{(d-2)/2}, 2^{(d+1)/2}, 2^{d/2} by d mod 8."""
    r = d % 8
    if r in (0, 4, 6):
        return 2 ** (d // 2)
    if r in (1, 3):
        return 2 ** ((d - 1) // 2)
    if r == 2:
        return 2 ** ((d - 2) // 2)
    return 2 ** ((d + 1) // 2)


def spin_connection_matrix(omega_X, rep, exact=None):
    """-1/4 omega_ab(X) Gamma^{ab} summed over all a, b.

    ``omega_X[a][b]`` = omega_ab(X), antisymmetric.
    """
    d = rep.d
    F = Form(d, 2)
    comps = {}
    for a in range(d):
        for b in range(a + 1, d):
            w = omega_X[a][b]
            if w != 0:
                comps[(a, b)] = w * Fraction(-1, 2) if isinstance(w, (int, Fraction)) else -0.5 * w
    F = Form(d, 2, comps)
    return clifford_matrix(F, rep, exact)
