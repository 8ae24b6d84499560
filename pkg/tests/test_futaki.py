import math

import numpy as np
import pytest

from mukstab.errors import NotReflexiveError, ValidationError
from mukstab.models.geometry import SamplerSpec
from mukstab.models.params import Params
from mukstab.toric import futaki
from mukstab.toric.fixtures import FIXTURE_NAMES, fixture
from mukstab.toric.plfunction import PLFunction, product_configuration


@pytest.mark.parametrize(
    'name, expected',
    [('interval', 4 * math.pi), ('square', 8 * math.pi), ('simplex2', 12 * math.pi)],
)
def test_mean_s_at_zero(name, expected):
    polytope = fixture(name)
    assert futaki.mean_s(polytope, Params.zero(polytope.dim)) == pytest.approx(
        expected, rel=1e-12
    )


def test_mu_character_interval():
    interval = fixture('interval')
    assert futaki.mu_character(interval, Params.zero(1)) == pytest.approx(
        -4 * math.pi, rel=1e-12
    )
    assert futaki.mu_character(interval, Params.zero(1, lam=1.0)) == pytest.approx(
        -4 * math.pi + 1, rel=1e-12
    )


def test_step_configuration(step):
    report = futaki.futaki_toric(fixture('interval'), step, Params.zero(1))
    assert report.value == pytest.approx(math.pi / 2, rel=1e-12)
    assert report.breakdown.Iq == pytest.approx(1 / 8)
    assert report.breakdown.Bq == pytest.approx(1 / 2)
    assert report.breakdown.per_hbar == pytest.approx(report.value / -2.0)
    assert futaki.donaldson_futaki(fixture('interval'), step) == pytest.approx(0.25)


def test_kahler_convention(step):
    interval = fixture('interval')
    params = Params(lam=1.0, hbar=-2.0, xi=(0.3,))
    assert futaki.kahler_futaki(interval, step, 1.0, [0.3]) == pytest.approx(
        2 * futaki.futaki_toric(interval, step, params).value
    )


def test_simplex_has_vanishing_futaki():
    simplex = fixture('simplex2')
    for zeta in np.eye(2):
        value = futaki.futaki_vector(simplex, Params.zero(2), zeta).value
        assert abs(value) < 1e-10


@pytest.mark.parametrize('name', ['sym_interval', 'cube'])
@pytest.mark.parametrize('lam', [-3.0, 0.0, 4.0])
def test_symmetric_polytopes_have_vanishing_futaki(name, lam):
    polytope = fixture(name)
    params = Params.zero(polytope.dim, lam=lam)
    value = futaki.futaki_vector(polytope, params, np.ones(polytope.dim)).value
    assert abs(value) < 1e-10


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_futaki_vector_is_minus_the_gradient(name):
    polytope = fixture(name)
    n = polytope.dim
    xi = np.linspace(0.2, -0.3, n)
    params = Params(lam=1.5, hbar=1.0, xi=tuple(xi))
    h = 1e-4
    for j in range(n):
        step = np.eye(n)[j] * h
        plus = futaki.mu_character(polytope, params.with_xi(xi + step))
        minus = futaki.mu_character(polytope, params.with_xi(xi - step))
        value = futaki.futaki_vector(polytope, params, np.eye(n)[j]).value
        assert value == pytest.approx(-(plus - minus) / (2 * h), abs=1e-6)


@pytest.mark.parametrize('hbar', [1.0, -2.0, 3.7])
def test_affine_configurations_match_vectors(hbar):
    polytope = fixture('blp2')
    params = Params(lam=2.5, hbar=hbar, xi=(0.2, -0.1))
    a = np.array([1.0, -0.5])
    q = PLFunction.affine(a.tolist(), 3)
    toric = futaki.futaki_toric(polytope, q, params).value
    vector = futaki.futaki_vector(polytope, params, -a / hbar).value
    assert toric == pytest.approx(vector, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize('shift', [-10, '7/2', 10])
def test_shift_invariance(shift):
    square = fixture('square')
    q = PLFunction.from_pieces([([0, 0], 0), ([1, 1], -1), ([-1, 0], '1/4')])
    params = Params(lam=-1.0, hbar=-2.0, xi=(0.4, 0.1))
    base = futaki.futaki_toric(square, q, params).value
    shifted = futaki.futaki_toric(square, q.shift(shift), params).value
    assert shifted == pytest.approx(base, rel=1e-9, abs=1e-9)


def test_linearity():
    square = fixture('square')
    params = Params(lam=-1.0, hbar=1.0, xi=(0.3, -0.2))
    first = PLFunction.from_pieces([([0, 0], 0), ([1, 0], '-1/2')])
    second = PLFunction.from_pieces([([0, 0], 0), ([1, 1], -1)])
    total = futaki.futaki_toric(square, first + second, params).value
    parts = (
        futaki.futaki_toric(square, first, params).value
        + futaki.futaki_toric(square, second, params).value
    )
    assert total == pytest.approx(parts, abs=1e-9)


def test_dimension_checks(step):
    with pytest.raises(ValidationError):
        futaki.futaki_toric(fixture('square'), step, Params.zero(2))
    with pytest.raises(ValidationError):
        futaki.futaki_vector(fixture('square'), Params.zero(2), [1.0])


def test_modified_futaki_needs_reflexive():
    q = PLFunction.affine([1, 0])
    with pytest.raises(NotReflexiveError):
        futaki.modified_futaki(fixture('square'), q, Params.zero(2, lam=futaki.TWO_PI))
    with pytest.raises(ValidationError):
        futaki.modified_futaki(fixture('blp2'), q, Params.zero(2, lam=1.0))


def test_relative_futaki_without_reference(step):
    interval = fixture('interval')
    assert futaki.relative_futaki(interval, step, -2.0, [0.0]) == pytest.approx(
        futaki.futaki_toric(interval, step, Params.zero(1)).value
    )


def test_samples_are_reproducible_and_normalised():
    polytope = fixture('blp2')
    sampler = SamplerSpec(count=20, max_pieces=3, coeff_bound=2.0, seed=5)
    first = futaki.sample_configurations(polytope, sampler)
    assert first == futaki.sample_configurations(polytope, sampler)
    for q in first:
        assert 1 <= len(q.pieces) <= 3
        assert min(q(v) for v in polytope.vertices) == 0
        for piece in q.pieces:
            assert all(abs(a) <= 2 for a in piece.gradient)
            assert all((8 * a).denominator == 1 for a in piece.gradient)


def test_scan_on_interval_is_semistable():
    report = futaki.semistability_scan(
        fixture('interval'), Params.zero(1), SamplerSpec(count=50, seed=3)
    )
    values = [sample.value for sample in report.samples]
    assert values == sorted(values)
    assert report.min_value == values[0]
    assert report.min_value >= -1e-10


def test_modified_futaki_detects_the_blowup():
    q = PLFunction.affine([1, 1])
    params = Params.zero(2, lam=futaki.TWO_PI)
    assert futaki.modified_futaki(fixture('blp2'), q, params) == pytest.approx(2 / 3)


def test_product_configuration_matches_vector():
    polytope = fixture('square')
    params = Params(lam=-2.0, hbar=-2.0, xi=(0.25, 0.5))
    zeta = [0.5, -1.0]
    q = product_configuration(zeta, params.hbar)
    assert futaki.futaki_toric(polytope, q, params).value == pytest.approx(
        futaki.futaki_vector(polytope, params, zeta).value, rel=1e-9, abs=1e-12
    )


KINKED = {
    'interval': PLFunction.from_pieces([([0], 0), ([1], '-1/2')]),
    'square': PLFunction.from_pieces([([0, 0], 0), ([1, 1], -1)]),
    'blp2': PLFunction.from_pieces([([0, 0], 0), ([1, 0], 0), ([0, 1], '1/2')]),
}


@pytest.mark.parametrize('name', sorted(KINKED))
@pytest.mark.parametrize('lam', [-3.0, 0.0, 1.5])
def test_weighted_futaki_with_mu_weights(name, lam):
    polytope, q = fixture(name), KINKED[name]
    xi = tuple(np.linspace(0.4, -0.3, polytope.dim))
    params = Params(lam=lam, hbar=1.0, xi=xi)
    v, w = futaki.mu_weights(params)
    expected = futaki.futaki_toric(polytope, q, params).value
    assert futaki.weighted_futaki(polytope, q, v, w) == pytest.approx(
        expected, rel=1e-9, abs=1e-12
    )


def test_weighted_futaki_with_constant_weights(step):
    interval = fixture('interval')

    def one(x):
        return np.ones(len(x))

    def zero(x):
        return np.zeros(len(x))

    expected = futaki.futaki_toric(interval, step, Params.zero(1)).value
    assert futaki.weighted_futaki(interval, step, one, zero) == pytest.approx(
        expected, rel=1e-12
    )
    constant = PLFunction.affine([0], 3)
    assert futaki.weighted_futaki(interval, constant, one, zero) == pytest.approx(
        0.0, abs=1e-12
    )
    with pytest.raises(ValidationError):
        futaki.weighted_futaki(fixture('square'), step, one, zero)
