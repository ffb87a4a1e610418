"""Exact matrices over Q(i).

A matrix is stored as ``num / den`` with ``num`` a complex128 array whose real
and imaginary parts are integers and ``den`` a positive Python int. Gamma
matrices have entries in {0, +-1, +-i}, so Clifford operators with rational
coefficients stay in this form. Integer arithmetic in float64 is exact below
2**53; every product is bounded beforehand and falls back to Python integers
when the bound could be exceeded.
"""

from fractions import Fraction
from math import gcd

import numpy as np

_SAFE = 2.0 ** 52


def _as_int_array(a):
    return np.rint(a).astype(np.int64)


def _obj(a):
    re = np.vectorize(int, otypes=[object])(_as_int_array(a.real)) if a.size else a.real.astype(object)
    im = np.vectorize(int, otypes=[object])(_as_int_array(a.imag)) if a.size else a.imag.astype(object)
    return re, im


class QMat:
    __slots__ = ("num", "den")

    def __init__(self, num, den=1, _reduce=True):
        self.num = np.asarray(num, dtype=complex)
        self.den = int(den)
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if _reduce:
            self._reduce()

    # construction --------------------------------------------------------
    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape, dtype=complex))

    @classmethod
    def from_rational(cls, entries):
        """From a nested sequence of Fractions / ints / (re, im) pairs."""
        arr = np.empty(np.shape(entries)[:2] if np.ndim(entries) >= 2 else np.shape(entries),
                       dtype=object)
        flat = []

        def parts(z):
            if isinstance(z, tuple):
                return Fraction(z[0]), Fraction(z[1])
            if isinstance(z, complex):
                return Fraction(z.real), Fraction(z.imag)
            return Fraction(z), Fraction(0)

        it = np.ndindex(arr.shape)
        for idx in it:
            e = entries
            for i in idx:
                e = e[i]
            flat.append((idx, parts(e)))
        den = 1
        for _, (a, b) in flat:
            den = den * a.denominator // gcd(den, a.denominator)
            den = den * b.denominator // gcd(den, b.denominator)
        num = np.zeros(arr.shape, dtype=complex)
        for idx, (a, b) in flat:
            num[idx] = complex(int(a * den), int(b * den))
        return cls(num, den)

    def _reduce(self):
        if self.num.size == 0:
            return
        if np.max(np.abs(self.num.real), initial=0) >= _SAFE or \
                np.max(np.abs(self.num.imag), initial=0) >= _SAFE:
            raise OverflowError("entries exceed the exact float64 range")
        ints = np.concatenate([_as_int_array(self.num.real).ravel(),
                               _as_int_array(self.num.imag).ravel()])
        g = int(np.gcd.reduce(np.abs(ints))) if ints.size else 0
        g = gcd(g, self.den)
        if g > 1:
            self.num = self.num / g
            self.den //= g
        if not np.any(ints):
            self.den = 1

    # arithmetic ------------------------------------------------------------
    @property
    def shape(self):
        return self.num.shape

    def _aligned(self, other):
        L = self.den * other.den // gcd(self.den, other.den)
        return self.num * (L // self.den), other.num * (L // other.den), L

    def __add__(self, other):
        if not isinstance(other, QMat):
            return NotImplemented
        a, b, L = self._aligned(other)
        return QMat(a + b, L)

    def __sub__(self, other):
        if not isinstance(other, QMat):
            return NotImplemented
        a, b, L = self._aligned(other)
        return QMat(a - b, L)

    def __neg__(self):
        return QMat(-self.num, self.den, _reduce=False)

    def __mul__(self, c):
        if isinstance(c, QMat):
            raise TypeError("use @ for matrix products")
        if isinstance(c, complex):
            re, im = Fraction(c.real), Fraction(c.imag)
        elif isinstance(c, tuple):
            re, im = Fraction(c[0]), Fraction(c[1])
        else:
            re, im = Fraction(c), Fraction(0)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        z = complex(int(re * d), int(im * d))
        return QMat(self.num * z, self.den * d)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, QMat):
            return NotImplemented
        inner = self.num.shape[-1]
        b1 = max(np.max(np.abs(self.num.real), initial=0), np.max(np.abs(self.num.imag), initial=0))
        b2 = max(np.max(np.abs(other.num.real), initial=0), np.max(np.abs(other.num.imag), initial=0))
        if 2.0 * b1 * b2 * inner < _SAFE:
            return QMat(self.num @ other.num, self.den * other.den)
        # exact fallback in Python integers
        ar, ai = _obj(self.num)
        br, bi = _obj(other.num)
        re = ar @ br - ai @ bi
        im = ar @ bi + ai @ br
        g = 0
        for v in list(re.ravel()) + list(im.ravel()):
            g = gcd(g, int(v))
        den = self.den * other.den
        g = gcd(g, den) if g else den
        re = re // g
        im = im // g
        den //= g
        return QMat(re.astype(float) + 1j * im.astype(float), den)

    @property
    def T(self):
        return QMat(self.num.T, self.den, _reduce=False)

    def conj(self):
        return QMat(np.conj(self.num), self.den, _reduce=False)

    def __eq__(self, other):
        if isinstance(other, QMat):
            return self.den == other.den and self.num.shape == other.num.shape and \
                bool(np.all(self.num == other.num))
        if isinstance(other, (int, Fraction)) and other == 0:
            return not np.any(self.num)
        return NotImplemented

    __hash__ = None

    def is_zero(self):
        return not np.any(self.num)

    def to_complex(self):
        return self.num / self.den

    def __array__(self, dtype=None, copy=None):
        a = self.to_complex()
        return a.astype(dtype) if dtype is not None else a

    def realified_integer(self):
        """Integer matrix [[Re, -Im], [Im, Re]] (scaled by den, rank unchanged)."""
        re = _as_int_array(self.num.real)
        im = _as_int_array(self.num.imag)
        return np.block([[re, -im], [im, re]])

    def max_abs(self):
        return float(np.max(np.abs(self.to_complex()), initial=0.0))

    def __repr__(self):
        return f"QMat(shape={self.num.shape}, den={self.den})"


def is_exact_scalar(c):
    return isinstance(c, (int, Fraction))


def integer_rank(M):
    """Exact rank of an integer matrix."""
    from sympy import QQ, ZZ
    from sympy.polys.matrices import DomainMatrix

    M = np.asarray(M)
    if M.size == 0:
        return 0
    rows = [[ZZ(int(v)) for v in row] for row in M.tolist()]
    return DomainMatrix(rows, M.shape, ZZ).convert_to(QQ).rank()


def numeric_rank(M, tol=1e-10):
    """Rank by SVD thresholding relative to max(1, largest singular value)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
