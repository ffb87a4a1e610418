"""Exterior algebra of k-forms over one tangent space with a Lorentzian metric.

Forms are stored as dictionaries from strictly increasing index tuples to
coefficients. Coefficients may be ``Fraction``/``int`` (exact mode), ``float``
or ``complex`` (numeric mode), or any ring element supporting ``+``, ``-``,
``*`` and comparison with ``0`` (the polynomial coefficients of
:mod:`sugracheck.poly` use this).

Conventions
-----------
* signature (-,+,...,+)
* <F,G> = sum over increasing tuples of F_I G^I
* the Hodge star is fixed by F ^ *G = <F,G> dvol
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
import math

import numpy as np


class DegreeError(ValueError):
    """Raised when a degree is out of range for the requested operation."""


class MetricError(ValueError):
    """Raised for singular or non-Lorentzian metrics."""


def _is_zero(c):
    return c == 0


def _perm_sign(seq):
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _signed_perms(k):
    return tuple((p, _perm_sign(p)) for p in permutations(range(k)))


def _merge_sign(a, b):
    """Sign of sorting the concatenation of two sorted disjoint tuples."""
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return -1 if inv % 2 else 1


class Form:
    """Degree-k form over an (n+1)-dimensional space."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs=None):
        if not 0 <= degree <= dim:
            raise DegreeError(f"degree {degree} outside [0, {dim}]")
        self.dim = dim
        self.degree = degree
        self.coeffs = {}
        for idx, c in (coeffs or {}).items():
            self._accumulate(tuple(idx), c)

    def _accumulate(self, idx, c):
        if len(idx) != self.degree:
            raise DegreeError(f"index tuple {idx} has wrong length for degree {self.degree}")
        if any(not 0 <= i < self.dim for i in idx):
            raise IndexError(f"index tuple {idx} out of range for dim {self.dim}")
        s = _perm_sign(idx)
        if s == 0 or _is_zero(c):
            return
        key = tuple(sorted(idx))
        val = self.coeffs.get(key, 0) + (c if s > 0 else -c)
        if _is_zero(val):
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = val

    # constructors
    @classmethod
    def scalar(cls, dim, c):
        return cls(dim, 0, {(): c})

    @classmethod
    def basis(cls, dim, idx, c=1):
        """c * alpha^{i1} ^ ... ^ alpha^{ik}; unsorted input picks up the sign."""
        return cls(dim, len(idx), {tuple(idx): c})

    @classmethod
    def from_dense(cls, arr, degree, dim=None):
        """Read the independent components of a fully antisymmetric array."""
        if degree == 0:
            return cls(dim, 0, {(): np.asarray(arr).item()})
        dim = arr.shape[0]
        out = cls(dim, degree)
        for idx in combinations(range(dim), degree):
            c = arr[idx]
            if c != 0:
                out.coeffs[idx] = c
        return out

    def copy(self):
        f = Form(self.dim, self.degree)
        f.coeffs = dict(self.coeffs)
        return f

    def __getitem__(self, idx):
        idx = tuple(idx)
        s = _perm_sign(idx)
        if s == 0:
            return 0
        c = self.coeffs.get(tuple(sorted(idx)), 0)
        return c if s > 0 else -c

    def _check(self, other):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DegreeError(
                f"incompatible forms: (dim {self.dim}, deg {self.degree}) vs "
                f"(dim {other.dim}, deg {other.degree})")

    def __add__(self, other):
        self._check(other)
        out = self.copy()
        for idx, c in other.coeffs.items():
            val = out.coeffs.get(idx, 0) + c
            if _is_zero(val):
                out.coeffs.pop(idx, None)
            else:
                out.coeffs[idx] = val
        return out

    def __neg__(self):
        out = Form(self.dim, self.degree)
        out.coeffs = {k: -v for k, v in self.coeffs.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Form):
            return wedge(self, c)
        out = Form(self.dim, self.degree)
        for k, v in self.coeffs.items():
            val = v * c
            if not _is_zero(val):
                out.coeffs[k] = val
        return out

    def __rmul__(self, c):
        out = Form(self.dim, self.degree)
        for k, v in self.coeffs.items():
            val = c * v
            if not _is_zero(val):
                out.coeffs[k] = val
        return out

    def __truediv__(self, c):
        return self * (1 / c if isinstance(c, float) else Fraction(1) / c)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.coeffs
        if not isinstance(other, Form):
            return NotImplemented
        if (self.dim, self.degree) != (other.dim, other.degree):
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self):
        return all(_is_zero(c) for c in self.coeffs.values())

    def map(self, fn):
        """Apply ``fn`` to every coefficient."""
        out = Form(self.dim, self.degree)
        for k, v in self.coeffs.items():
            val = fn(v)
            if not _is_zero(val):
                out.coeffs[k] = val
        return out

    def max_abs(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def to_float(self):
        return self.map(float)

    def to_dense(self, dtype=float):
        """Fully antisymmetric array of shape (dim,)*degree."""
        shape = (self.dim,) * self.degree
        arr = np.zeros(shape, dtype=dtype)
        if self.degree == 0:
            return np.array(self.coeffs.get((), 0), dtype=dtype)
        perms = _signed_perms(self.degree)
        for idx, c in self.coeffs.items():
            for perm, s in perms:
                arr[tuple(idx[p] for p in perm)] = s * c
        return arr

    def scalar_value(self):
        if self.degree != 0:
            raise DegreeError("not a 0-form")
        return self.coeffs.get((), 0)

    def __repr__(self):
        terms = ", ".join(f"{k}: {v}" for k, v in sorted(self.coeffs.items()))
        return f"Form(dim={self.dim}, degree={self.degree}, {{{terms}}})"


def zero_form(dim, degree):
    return Form(dim, degree)


def wedge(F, G):
    """Exterior product; raises DegreeError if the degrees overflow."""
    if F.dim != G.dim:
        raise DegreeError("dimension mismatch in wedge")
    deg = F.degree + G.degree
    if deg > F.dim:
        raise DegreeError(f"wedge degree {deg} exceeds dimension {F.dim}")
    out = Form(F.dim, deg)
    acc = out.coeffs
    for I, a in F.coeffs.items():
        sI = set(I)
        for J, b in G.coeffs.items():
            if sI.intersection(J):
                continue
            key = tuple(sorted(I + J))
            term = a * b
            if _merge_sign(I, J) < 0:
                term = -term
            acc[key] = acc[key] + term if key in acc else term
    for k in [k for k, v in acc.items() if _is_zero(v)]:
        del acc[k]
    return out


def interior(X, F):
    """Contraction i_X F of a vector (frame or coordinate components) with F."""
    if F.degree == 0:
        raise DegreeError("cannot contract a vector with a 0-form")
    if len(X) != F.dim:
        raise DegreeError("vector length does not match form dimension")
    out = Form(F.dim, F.degree - 1)
    acc = out.coeffs
    for I, c in F.coeffs.items():
        for p, mu in enumerate(I):
            x = X[mu]
            if _is_zero(x):
                continue
            key = I[:p] + I[p + 1:]
            term = x * c
            if p % 2:
                term = -term
            acc[key] = acc[key] + term if key in acc else term
    for k in [k for k, v in acc.items() if _is_zero(v)]:
        del acc[k]
    return out


def _det_exact(rows):
    """Determinant by Gaussian elimination over any field (small matrices)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if not _is_zero(m[r][col])), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if _is_zero(f):
                continue
            for c in range(col, n):
                m[r][c] = m[r][c] - f * m[col][c]
    return det


def _inverse_exact(rows):
    n = len(rows)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not _is_zero(m[r][col])), None)
        if piv is None:
            raise MetricError("singular metric")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and not _is_zero(m[r][col]):
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def _exact_sqrt(q):
    q = Fraction(q)
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return math.sqrt(q)


def _is_exact(x):
    return isinstance(x, (int, Fraction))


class Metric:
    """Lorentzian metric g_{mu nu} at a point, with inverse, |det| and orientation."""

    def __init__(self, components, orientation=1, check_signature=True):
        if orientation not in (1, -1):
            raise MetricError("orientation must be +1 or -1")
        rows = [list(r) for r in (components.tolist() if isinstance(components, np.ndarray)
                                  else components)]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MetricError("metric must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    if not (_is_exact(rows[i][j]) and _is_exact(rows[j][i])) and \
                            abs(rows[i][j] - rows[j][i]) <= 1e-12 * (1 + abs(rows[i][j])):
                        continue
                    raise MetricError("metric must be symmetric")
        self.dim = n
        self.orientation = orientation
        self.exact = all(_is_exact(x) for r in rows for x in r)
        self.diagonal = all(_is_zero(rows[i][j]) for i in range(n) for j in range(n) if i != j)
        if self.exact:
            self.components = [[Fraction(x) for x in r] for r in rows]
            det = _det_exact(self.components)
            if det == 0:
                raise MetricError("singular metric")
            if self.diagonal:
                self.inverse = [[Fraction(1) / self.components[i][i] if i == j else Fraction(0)
                                 for j in range(n)] for i in range(n)]
            else:
                self.inverse = _inverse_exact(self.components)
            neg = None
        else:
            arr = np.array(rows, dtype=float)
            det = float(np.linalg.det(arr))
            if det == 0 or not np.isfinite(det):
                raise MetricError("singular metric")
            self.components = arr
            self.inverse = np.linalg.inv(arr)
            neg = int(np.sum(np.linalg.eigvalsh(arr) < 0))
        if check_signature and n > 1:
            if neg is None:
                neg = _negative_index_exact(self.components)
            if neg != 1:
                raise MetricError(f"metric has {neg} negative directions; expected signature (-,+,...,+)")
        self.det_abs = abs(det)
        self.sqrt_det = _exact_sqrt(self.det_abs) if self.exact else math.sqrt(self.det_abs)

    @classmethod
    def minkowski(cls, dim):
        return cls([[Fraction(-1 if i == j == 0 else int(i == j)) for j in range(dim)]
                    for i in range(dim)])

    def g(self, i, j):
        return self.components[i][j]

    def ginv(self, i, j):
        return self.inverse[i][j]

    def as_array(self):
        return np.array(self.components, dtype=float)

    def inverse_array(self):
        return np.array(self.inverse, dtype=float)


def _negative_index_exact(rows):
    """Number of negative eigenvalues via LDL^T with symmetric pivoting (Sylvester)."""
    n = len(rows)
    m = [list(r) for r in rows]
    neg = 0
    order = list(range(n))
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if not _is_zero(m[order[i]][order[i]])), None)
        if piv is None:
            # all remaining diagonal entries vanish: rotate a 2x2 block
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n)
                         if not _is_zero(m[order[i]][order[j]])), None)
            if pair is None:
                return -1
            i, j = pair
            a, b = order[i], order[j]
            for r in range(n):
                m[r][a] = m[r][a] + m[r][b]
            for c in range(n):
                m[a][c] = m[a][c] + m[b][c]
            continue
        order[k], order[piv] = order[piv], order[k]
        p = order[k]
        d = m[p][p]
        if d < 0:
            neg += 1
        for i in range(k + 1, n):
            r = order[i]
            f = m[r][p] / d
            if _is_zero(f):
                continue
            for j in range(k, n):
                c = order[j]
                m[r][c] = m[r][c] - f * m[p][c]
            for j in range(k, n):
                c = order[j]
                m[c][r] = m[r][c]
        k += 1
    return neg


def flat(X, g):
    """X^flat = g(X, .)."""
    n = g.dim
    comps = {}
    for mu in range(n):
        s = 0
        for nu in range(n):
            if not _is_zero(X[nu]):
                s = s + g.components[mu][nu] * X[nu]
        comps[(mu,)] = s
    return Form(n, 1, comps)


def sharp(alpha, g):
    """The vector alpha^sharp with alpha = g(alpha^sharp, .)."""
    if alpha.degree != 1:
        raise DegreeError("sharp expects a 1-form")
    n = g.dim
    out = []
    for mu in range(n):
        s = 0
        for (nu,), c in alpha.coeffs.items():
            s = s + g.inverse[mu][nu] * c
        out.append(s)
    return out


def raise_indices(F, g):
    """Components F^{I} = g^{I J} F_J, stored in a Form for convenience."""
    k = F.degree
    out = Form(F.dim, k)
    if k == 0:
        out.coeffs = dict(F.coeffs)
        return out
    inv = g.inverse
    if g.diagonal:
        for I, c in F.coeffs.items():
            f = c
            for i in I:
                f = f * inv[i][i]
            out.coeffs[I] = f
        return out
    if g.exact:
        targets = list(combinations(range(F.dim), k))
        for J in targets:
            s = 0
            for I, c in F.coeffs.items():
                m = _det_exact([[inv[a][b] for b in I] for a in J])
                if not _is_zero(m):
                    s = s + m * c
            if not _is_zero(s):
                out.coeffs[J] = s
        return out
    return minor_transform(np.asarray(inv, dtype=float), F)


def scalar_product(F, G, g):
    """<F,G> = sum_{I increasing} F_I G^I."""
    if F.degree != G.degree:
        raise DegreeError("scalar product needs equal degrees")
    if F.dim != G.dim or F.dim != g.dim:
        raise DegreeError("dimension mismatch")
    if len(F.coeffs) > len(G.coeffs):
        F, G = G, F
    if not g.diagonal and g.exact:
        inv = g.inverse
        total = 0
        for I, a in F.coeffs.items():
            for J, b in G.coeffs.items():
                m = _det_exact([[inv[x][y] for y in J] for x in I])
                if not _is_zero(m):
                    total = total + a * m * b
        return total
    Graised = raise_indices(G, g)
    total = 0
    for I, a in F.coeffs.items():
        b = Graised.coeffs.get(I)
        if b is not None:
            total = total + a * b
    return total


def norm_sq(F, g):
    """|F|^2 = <F,F> (not positive definite)."""
    return scalar_product(F, F, g)


def volume_form(g):
    n = g.dim
    return Form(n, n, {tuple(range(n)): g.orientation * g.sqrt_det})


def hodge_star(F, g):
    """Hodge dual fixed by F' ^ *F = <F',F> dvol for every F' of the same degree.

    Pairing the degree-k basis with the degree-(n+1-k) basis gives a signed
    permutation matrix, so solving the defining relation on basis forms yields
    (*F)_{I^c} = sign(I, I^c) * orientation * sqrt|g| * F^I.
    """
    n = F.dim
    k = F.degree
    s = g.orientation * g.sqrt_det
    raised = raise_indices(F, g)
    out = Form(n, n - k)
    full = set(range(n))
    for I, c in raised.coeffs.items():
        Ic = tuple(sorted(full.difference(I)))
        val = c * s
        if _merge_sign(I, Ic) < 0:
            val = -val
        if not _is_zero(val):
            out.coeffs[Ic] = val
    return out


def basis_forms(dim, degree):
    for idx in combinations(range(dim), degree):
        yield Form.basis(dim, idx)


def frame_components(F, frame):
    """Components F(e_{a1},...,e_{ak}) of a coordinate form in a frame.

    ``frame`` is an array E with E[a, mu] = e_a^mu.
    """
    k = F.degree
    if k == 0:
        return F.copy()
    E = np.asarray(frame)
    if E.dtype == object:
        # exact path through minors
        out = Form(F.dim, k)
        for A in combinations(range(F.dim), k):
            s = 0
            for I, c in F.coeffs.items():
                m = _det_exact([[E[a][i] for i in I] for a in A])
                if not _is_zero(m):
                    s = s + m * c
            if not _is_zero(s):
                out.coeffs[A] = s
        return out
    return minor_transform(E.astype(float), F)


def minor_transform(M, F, chunk=4096):
    """Form with components sum_I det(M[A, I]) F_I for every increasing A.

    This is the action of M on each slot of an antisymmetric tensor, computed
    through k x k minors so that high degrees never need a dense n^k array.
    """
    k = F.degree
    n = F.dim
    out = Form(n, k)
    if not F.coeffs:
        return out
    keys = list(F.coeffs)
    src = np.array(keys, dtype=int).reshape(len(keys), k)
    vals = np.array([F.coeffs[I] for I in keys])
    targets = np.array(list(combinations(range(n), k)), dtype=int).reshape(-1, k)
    for start in range(0, len(targets), max(1, chunk // max(1, len(keys)))):
        A = targets[start:start + max(1, chunk // max(1, len(keys)))]
        sub = M[A[:, None, :, None], src[None, :, None, :]]
        res = np.linalg.det(sub) @ vals
        for row, v in zip(A, res):
            if v != 0:
                out.coeffs[tuple(int(i) for i in row)] = v.item() if hasattr(v, "item") else v
    return out
