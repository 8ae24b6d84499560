import math

import numpy as np
import pytest

from mukstab.errors import NotReflexiveError, ValidationError
from mukstab.models.geometry import SamplerSpec
from mukstab.models.params import Params
from mukstab.models.reports import CriticalStatus
from mukstab.toric import futaki, volmin
from mukstab.toric.fixtures import fixture
from mukstab.toric.plfunction import PLFunction


def test_grad_mu_matches_differences():
    square = fixture('square')
    xi = np.array([0.4, -0.7])
    params = Params(lam=1.0, hbar=1.0, xi=tuple(xi))
    h = 1e-4
    expected = [
        (
            futaki.mu_character(square, params.with_xi(xi + h * e))
            - futaki.mu_character(square, params.with_xi(xi - h * e))
        )
        / (2 * h)
        for e in np.eye(2)
    ]
    np.testing.assert_allclose(volmin.grad_mu(square, params), expected, atol=1e-6)


def test_hessian_mu_matches_differences():
    polytope = fixture('blp2')
    xi = np.array([0.3, 0.2])
    params = Params(lam=-3.0, hbar=1.0, xi=tuple(xi))
    hessian = volmin.hessian_mu(polytope, params)
    np.testing.assert_allclose(hessian, hessian.T, atol=1e-12)
    h = 1e-3
    columns = [
        (
            volmin.grad_mu(polytope, params.with_xi(xi + h * e))
            - volmin.grad_mu(polytope, params.with_xi(xi - h * e))
        )
        / (2 * h)
        for e in np.eye(2)
    ]
    np.testing.assert_allclose(hessian, np.column_stack(columns), atol=1e-4)


def test_symmetric_polytope_is_critical_at_zero():
    point = volmin.find_critical(fixture('sym_interval'), 0.0, -2.0)
    assert point.status is CriticalStatus.converged
    assert point.newton_iters == 0
    assert point.xi == [0.0]


def test_soliton_vector_of_blp2():
    polytope = fixture('blp2')
    soliton = volmin.tian_zhu(polytope, 1.0)
    assert soliton.xi[0] == pytest.approx(soliton.xi[1], abs=1e-9)
    assert soliton.xi[0] > 0
    barycenter = volmin.weighted_barycenter(polytope, np.asarray(soliton.xi))
    assert np.linalg.norm(barycenter) < 1e-8

    critical = volmin.find_critical(polytope, futaki.TWO_PI, 1.0)
    np.testing.assert_allclose(critical.xi, soliton.xi, atol=1e-7)

    params = Params(lam=futaki.TWO_PI, hbar=1.0, xi=tuple(soliton.xi))
    for gradient in np.eye(2):
        q = PLFunction.affine(gradient.tolist())
        assert abs(futaki.modified_futaki(polytope, q, params)) < 1e-8


def test_scans_around_the_soliton_of_blp2():
    polytope = fixture('blp2')
    soliton = volmin.tian_zhu(polytope, 1.0)
    sampler = SamplerSpec(count=100, seed=0)
    at_soliton = Params(lam=futaki.TWO_PI, hbar=1.0, xi=tuple(soliton.xi))
    assert futaki.semistability_scan(polytope, at_soliton, sampler).min_value >= -1e-8
    at_zero = Params.zero(2, lam=futaki.TWO_PI, hbar=1.0)
    assert futaki.semistability_scan(polytope, at_zero, sampler).min_value < 0


def test_soliton_vector_scales_with_hbar():
    polytope = fixture('blp2')
    at_one = volmin.tian_zhu(polytope, 1.0)
    at_minus_two = volmin.tian_zhu(polytope, -2.0)
    np.testing.assert_allclose(
        np.multiply(at_minus_two.xi, -2.0), at_one.xi, atol=1e-8
    )


def test_soliton_needs_reflexive():
    with pytest.raises(NotReflexiveError):
        volmin.tian_zhu(fixture('square'), 1.0)


def test_extremal_vector():
    assert np.linalg.norm(volmin.extremal_vector(fixture('cube'), 1.0)) < 1e-12
    assert np.linalg.norm(volmin.extremal_vector(fixture('simplex2'), 1.0)) < 1e-10
    np.testing.assert_allclose(
        volmin.extremal_vector(fixture('blp2'), 1.0),
        [-12 * math.pi / 11] * 2,
        rtol=1e-10,
    )
    np.testing.assert_allclose(
        volmin.extremal_vector(fixture('blp2'), -2.0),
        [6 * math.pi / 11] * 2,
        rtol=1e-10,
    )


def test_relative_futaki_vanishes_on_affines():
    polytope = fixture('blp2')
    xi_ext = volmin.extremal_vector(polytope, 1.0)
    for gradient in np.eye(2):
        q = PLFunction.affine(gradient.tolist())
        assert abs(futaki.relative_futaki(polytope, q, 1.0, xi_ext)) < 1e-9


def test_limit_check_approaches_the_extremal_vector():
    polytope = fixture('blp2')
    diagnostics = volmin.limit_check(polytope, 1.0)
    xi_ext = np.asarray(diagnostics.xi_ext)
    assert diagnostics.deviations[-1] < 1e-2 * (1 + np.linalg.norm(xi_ext))
    assert diagnostics.deviations[-1] < diagnostics.deviations[0]
    assert len(diagnostics.samples) == len(volmin.DEFAULT_SCHEDULE)


@pytest.mark.parametrize('schedule', [[-10.0, -1.0], [-10.0, -10.0], [5.0, -1.0], []])
def test_limit_check_schedule_validation(schedule):
    with pytest.raises(ValidationError):
        volmin.limit_check(fixture('blp2'), 1.0, schedule)


def test_hbar_must_be_nonzero():
    with pytest.raises(ValidationError):
        volmin.find_critical(fixture('interval'), 0.0, 0.0)
    with pytest.raises(ValidationError):
        volmin.extremal_vector(fixture('interval'), 0.0)
