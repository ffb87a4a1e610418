import random
from fractions import Fraction

import numpy as np
import pytest

from helpers import wavy_patch
from sugracheck.eomiia import background_iia
from sugracheck.fields import BackgroundError
from sugracheck.identities import rand_exact_metric, rand_vector
from sugracheck.poly import Poly
from sugracheck.reduction import (BBS_REMARK, block_metric, build_gm, chern_simons_check,
                                  connection_reduction_check, exact_metric_checks,
                                  field_strength_reduce, killing_reduction_check,
                                  lagrangian_reduction_check, metric_checks,
                                  mixed_gamma_identity, random_killing_data)
from sugracheck.variation import random_poly_form

POINTS = [np.random.default_rng(4).uniform(-0.3, 0.3, 10)]


def _base(seed=2):
    r = random.Random(seed)
    pots = {k: random_poly_form(10, d, r, ncomps=3) for k, d in (("C1", 1), ("B2", 2), ("C3", 3))}
    phi = Poly(10, {(1,) + (0,) * 9: Fraction(1, 5), (0, 2) + (0,) * 8: Fraction(1, 7),
                    (0,) * 10: Fraction(1, 10)})
    return background_iia(patch=wavy_patch(seed=1, step=1e-4), phi=phi, potentials=pots)


@pytest.fixture(scope="module", params=[False, True], ids=["paper", "bbs"])
def rd(request):
    return build_gm(_base(), bbs=request.param, kappa11=1.3, fiber_length=2.0)


def test_metric_and_frame(rd):
    rep = metric_checks(rd, POINTS)
    assert rep.passed, rep.residuals


def test_connection_matches_koszul(rd):
    rep = connection_reduction_check(rd, POINTS)
    assert rep.residuals["omega_all"] < 1e-6
    assert rep.passed, rep.residuals


def test_field_strength_components(rd):
    rep = field_strength_reduce(rd, POINTS)
    assert rep.passed, rep.residuals


def test_scalar_curvature_density(rd):
    rep = lagrangian_reduction_check(rd, POINTS)
    assert rep.residuals["scalar_curvature"] < 1e-4
    assert rep.residuals["einstein_density"] < 1e-4
    assert rep.residuals["oneill"] < 1e-4
    assert rep.residuals["coupling_einstein"] < 1e-12


def test_bbs_note(rd):
    assert (BBS_REMARK in rd.notes) == rd.bbs


@pytest.mark.parametrize("seed", range(3))
def test_chern_simons_split_exact(seed):
    r = random.Random(seed)
    out = chern_simons_check(*(random_poly_form(10, k, r, ncomps=2) for k in (1, 2, 3)))
    assert out == {"chern_simons": True, "field_strength": True}


@pytest.mark.parametrize("seed", range(5))
def test_block_metric_exact(seed):
    r = random.Random(seed)
    gN = rand_exact_metric(r, 10, nentries=3).components
    c = rand_vector(r, 10, 3)
    u = Fraction(r.randint(1, 4), r.randint(1, 3))
    assert all(exact_metric_checks(gN, c, u).values())
    gM = block_metric(gN, c, u)
    assert gM[10][10] == u ** 4


def test_mixed_gamma_sign():
    assert mixed_gamma_identity()
    assert not mixed_gamma_identity(delta_sign=-1)


@pytest.mark.parametrize("bbs", [False, True])
def test_killing_reduction_exact(bbs):
    rng = np.random.default_rng(11)
    for _ in range(3):
        out = killing_reduction_check(random_killing_data(rng), bbs=bbs)
        assert all(out.values()), out


def test_killing_reduction_needs_the_positive_rescale():
    kd = random_killing_data(np.random.default_rng(1))
    assert not killing_reduction_check(kd, rescale=Fraction(-1, 6))["gravitino_from_direction_a"]


def test_killing_reduction_rejects_float_data():
    kd = random_killing_data(np.random.default_rng(2))
    kd.u = 1.5
    with pytest.raises(BackgroundError):
        killing_reduction_check(kd)


def test_build_gm_requires_string_patch():
    from sugracheck.eomiia import minkowski_iia
    with pytest.raises(BackgroundError):
        build_gm(minkowski_iia())
