"""Shared random backgrounds for the ten-dimensional tests."""

import math
import random
from fractions import Fraction

import numpy as np

from sugracheck.patchcalc import FramePatch
from sugracheck.poly import Poly
from sugracheck.variation import random_poly_form


def wavy_patch(n=10, seed=0, amp=0.05, step=1e-4):
    A = np.random.default_rng(seed).normal(size=(n, n)) * amp
    eta = np.diag([-1.0] + [1.0] * (n - 1))

    def g(y):
        B = np.eye(n) + A * math.sin(y[1]) + 0.03 * y[2] * np.eye(n)
        return B.T @ eta @ B
    return FramePatch(g, n, step=step)


def poly_dilaton(n=10, seed=0):
    return Poly.random(n, 2, random.Random(seed), nterms=3) * Fraction(1, 4)


def poly_forms(degrees, seed=0, n=10, ncomps=3):
    r = random.Random(seed)
    return {name: random_poly_form(n, k, r, max_poly_degree=1, ncomps=ncomps)
            for name, k in degrees.items()}


POINT = np.full(10, 0.1)
