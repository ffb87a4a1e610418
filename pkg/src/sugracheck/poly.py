"""Exact multivariate polynomials with rational coefficients.

Used as form coefficients in the exact (polynomial) mode of the patch calculus:
the ring is closed under +, -, * and partial derivatives, which is all that
d, wedge and a constant-metric Hodge star need.
"""

from fractions import Fraction
import random


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms = {}
        for exps, c in (terms or {}).items():
            if c != 0:
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError("exponent tuple has the wrong length")
                self.terms[exps] = self.terms.get(exps, 0) + Fraction(c)
                if self.terms[exps] == 0:
                    del self.terms[exps]

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def random(cls, nvars, degree, rng, nterms=3, num=5, den=3):
        terms = {}
        for _ in range(nterms):
            e = [0] * nvars
            for _ in range(rng.randint(0, degree)):
                e[rng.randrange(nvars)] += 1
            terms[tuple(e)] = Fraction(rng.randint(-num, num), rng.randint(1, den))
        return cls(nvars, terms)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = Poly(self.nvars)
        out.terms = dict(self.terms)
        for e, c in other.terms.items():
            v = out.terms.get(e, 0) + c
            if v == 0:
                out.terms.pop(e, None)
            else:
                out.terms[e] = v
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly(self.nvars)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            out = Poly(self.nvars)
            if c != 0:
                out.terms = {e: v * c for e, v in self.terms.items()}
            return out
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c != 0}
        return p

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (Fraction(1) / Fraction(c))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(0,) * self.nvars: Fraction(other)}
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = out.get(tuple(ne), 0) + c * e[i]
        return Poly(self.nvars, out)

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, point):
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        if all(isinstance(x, (int, Fraction)) for x in point):
            return Fraction(total)
        return float(total)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mon = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)


def random_poly(nvars, degree, seed=None, **kw):
    return Poly.random(nvars, degree, random.Random(seed), **kw)
