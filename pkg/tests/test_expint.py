import math

import numpy as np
import pytest

from mukstab.errors import (
    DegenerateDirectionError,
    ExponentOverflowError,
    NotDelzantError,
    ValidationError,
)
from mukstab.toric import expint
from mukstab.toric.fixtures import FIXTURE_NAMES, fixture
from mukstab.toric.polytope import from_vertices


def test_divided_difference_two_nodes():
    result = expint.exp_divided_difference([0.0, 1.0])
    assert math.isclose(result.value, math.e - 1, rel_tol=1e-14)
    assert result.method is expint.IntegrationMethod.taylor_cluster


def test_divided_difference_repeated_nodes():
    assert math.isclose(expint.exp_divided_difference([0.0, 0.0]).value, 1.0)
    assert math.isclose(
        expint.exp_divided_difference([2.0, 2.0, 2.0]).value,
        math.exp(2.0) / 2,
        rel_tol=1e-14,
    )


def test_divided_difference_recursion():
    a, b, c = 0.0, 2.5, 5.0
    first = (math.exp(b) - math.exp(a)) / (b - a)
    second = (math.exp(c) - math.exp(b)) / (c - b)
    expected = (second - first) / (c - a)
    result = expint.exp_divided_difference([c, a, b])
    assert result.method is expint.IntegrationMethod.divided_difference
    assert math.isclose(result.value, expected, rel_tol=1e-12)
    assert result.condition_estimate >= 1.0


def test_divided_difference_overflow():
    with pytest.raises(ExponentOverflowError):
        expint.exp_divided_difference([0.0, 800.0])


@pytest.mark.parametrize('b', [1.0 - 1e-9, 1.0 + 1e-9])
def test_divided_difference_across_the_cluster_switch(b):
    result = expint.exp_divided_difference([0.0, b])
    assert math.isclose(result.value, math.expm1(b) / b, rel_tol=1e-12)

    a = 0.5
    upper = math.exp(a) * math.expm1(b - a) / (b - a)
    expected = (upper - math.expm1(a) / a) / b
    three = expint.exp_divided_difference([0.0, a, b])
    assert math.isclose(three.value, expected, rel_tol=1e-12)


def test_divided_difference_is_continuous_at_the_switch():
    below = expint.exp_divided_difference([0.0, 0.5, 1.0 - 1e-9])
    above = expint.exp_divided_difference([0.0, 0.5, 1.0 + 1e-9])
    assert below.method is expint.IntegrationMethod.taylor_cluster
    assert above.method is expint.IntegrationMethod.divided_difference
    assert abs(above.value - below.value) < 1e-8


def test_complete_homogeneous():
    assert expint.complete_homogeneous([1.0, 2.0], 2) == [1.0, 3.0, 7.0]


def test_interval_exp():
    assert math.isclose(
        expint.polytope_exp(fixture('interval'), [-1.0]), math.e - 1, rel_tol=1e-14
    )


def test_square_exp_factorises():
    s = np.array([0.3, 0.7])
    expected = math.prod((1 - math.exp(-t)) / t for t in s)
    assert math.isclose(
        expint.polytope_exp(fixture('square'), s), expected, rel_tol=1e-13
    )


def test_covector_shape_is_checked():
    with pytest.raises(ValidationError):
        expint.polytope_exp(fixture('square'), [1.0])
    with pytest.raises(ValidationError):
        expint.polytope_exp(fixture('interval'), [math.nan])


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_brion_matches_triangulation(name):
    polytope = fixture(name)
    rng = np.random.default_rng(7)
    for _ in range(10):
        s = rng.normal(size=polytope.dim) * 2
        exact = expint.polytope_exp(polytope, s)
        assert math.isclose(expint.brion_exp(polytope, s), exact, rel_tol=1e-9)


def test_brion_on_a_pole():
    # s = (1, 0) is orthogonal to the vertical edges of the square
    value = expint.brion_exp(fixture('square'), [1.0, 0.0])
    assert math.isclose(value, 1 - math.exp(-1), rel_tol=1e-10)


@pytest.mark.parametrize('name, volume', [('square', 1), ('blp2', 4), ('cube', 8)])
def test_brion_at_zero(name, volume):
    polytope = fixture(name)
    value = expint.brion_exp(polytope, np.zeros(polytope.dim))
    assert math.isclose(value, volume, rel_tol=1e-9)


@pytest.mark.parametrize(
    'name, s',
    [
        ('square', [1.0, 0.0]),
        ('blp2', [1.0, 1.0]),
        ('blp2', [1e-3, 2e-3]),
        ('cube', [2.0, 0.0, 0.0]),
        ('cube', [1.0, -1.0, 0.0]),
    ],
)
def test_brion_on_pole_directions(name, s):
    polytope = fixture(name)
    exact = expint.polytope_exp(polytope, s)
    assert math.isclose(expint.brion_exp(polytope, s), exact, rel_tol=1e-9)


def test_brion_reports_an_unreliable_contour(monkeypatch):
    monkeypatch.setattr(expint, 'BRION_TOLERANCE', 0.0)
    with pytest.raises(DegenerateDirectionError):
        expint.brion_exp(fixture('square'), [0.0, 0.0])


def test_brion_needs_delzant():
    with pytest.raises(NotDelzantError):
        expint.brion_exp(from_vertices([(-1, -1), (1, 0), (0, 1)]), [0.1, 0.2])


def test_moments_at_zero():
    moments = expint.polytope_moments(fixture('square'), [0.0, 0.0], order=2)
    assert math.isclose(float(moments[0]), 1.0)
    np.testing.assert_allclose(moments[1], [0.5, 0.5])
    np.testing.assert_allclose(moments[2], [[1 / 3, 1 / 4], [1 / 4, 1 / 3]])


def test_first_moment_of_interval():
    # int_0^1 x e^{-x} dx = 1 - 2/e
    moments = expint.polytope_moments(fixture('interval'), [1.0], order=1)
    assert math.isclose(float(moments[1][0]), 1 - 2 / math.e, rel_tol=1e-13)


def test_moments_independent_of_triangulation():
    polytope = fixture('blp2')
    s = np.array([0.4, -0.9])
    simplices = expint.triangulate(polytope, [3, 2, 1, 0])
    other = expint.integrate_simplices(simplices, s, 2)
    default = expint.polytope_moments(polytope, s, 2)
    for k in range(3):
        np.testing.assert_allclose(other[k], default[k], rtol=1e-12, atol=1e-13)


def test_boundary_exp():
    s = 0.8
    assert math.isclose(
        expint.boundary_exp(fixture('sym_interval'), [s]),
        math.exp(s) + math.exp(-s),
        rel_tol=1e-14,
    )
    assert expint.boundary_exp(fixture('cube'), [0.0, 0.0, 0.0]) == 24


def test_affine_and_pl_integrals(step):
    interval = fixture('interval')
    assert math.isclose(
        expint.polytope_exp_affine(interval, [0.0], ([2], 1)), 2.0, rel_tol=1e-14
    )
    assert math.isclose(expint.polytope_exp_pl(interval, [0.0], step), 1 / 8)
    # int_{1/2}^1 (x - 1/2) x dx = 5/48
    np.testing.assert_allclose(
        expint.polytope_exp_pl_moment(interval, [0.0], step), [5 / 48]
    )
    assert math.isclose(expint.boundary_exp_pl(interval, [0.0], step), 0.5)


def test_power_moment():
    interval = fixture('interval')
    assert math.isclose(expint.polytope_power_moment(interval, [1.0], 2), 1 / 3)
    odd = expint.polytope_power_moment(fixture('sym_interval'), [1.0], 3)
    assert math.isclose(odd, 0.0, abs_tol=1e-15)


def test_central_differences_converge_at_second_order():
    square = fixture('square')
    s, zeta = np.array([0.3, 0.7]), np.array([1.0, 2.0])
    exact = -expint.polytope_exp_affine(square, s, (zeta.tolist(), 0))
    errors = []
    for h in (1e-3, 1e-4):
        plus = expint.polytope_exp(square, s + h * zeta)
        minus = expint.polytope_exp(square, s - h * zeta)
        errors.append(abs((plus - minus) / (2 * h) - exact))
    assert math.log10(errors[0] / errors[1]) >= 1.9


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_exp_integral_is_positive(name):
    polytope = fixture(name)
    rng = np.random.default_rng(11)
    for _ in range(20):
        s = rng.normal(size=polytope.dim)
        s *= rng.uniform(0.0, 50.0) / np.linalg.norm(s)
        value = expint.polytope_exp(polytope, s)
        assert math.isfinite(value)
        assert value > 0


def test_simplex_quadrature_integrates_the_moments():
    polytope = fixture('blp2')
    s = np.array([0.4, -0.9])
    total, first = [], []
    for simplex in polytope.simplices:
        points, weights = expint.simplex_quadrature(simplex)
        density = np.exp(-(points @ s))
        total.append(weights @ density)
        first.append(weights @ (points * density[:, None]))
    moments = expint.polytope_moments(polytope, s, order=1)
    assert math.isclose(sum(total), float(moments[0]), rel_tol=1e-12)
    np.testing.assert_allclose(np.sum(first, axis=0), moments[1], rtol=1e-12)
