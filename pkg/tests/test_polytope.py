import math
from fractions import Fraction

import numpy as np
import pytest

from mukstab.errors import (
    EmptyPolytopeError,
    NotFullDimensionalError,
    UnboundedError,
    ValidationError,
)
from mukstab.models.utils import parse_rational
from mukstab.toric.fixtures import FIXTURE_NAMES, fixture, fixtures
from mukstab.toric.linalg import det, inverse_columns, rank, to_fraction
from mukstab.toric.polytope import (
    check_delzant,
    from_halfspaces,
    from_vertices,
    refine_for_pl,
    triangulate,
)


def test_fixture_volumes():
    assert fixture('interval').volume == 1
    assert fixture('sym_interval').volume == 2
    assert fixture('square').volume == 1
    assert fixture('simplex2').volume == Fraction(1, 2)
    assert fixture('blp2').volume == 4
    assert fixture('cube').volume == 8


def test_blp2_vertices():
    assert fixture('blp2').vertices == ((-1, 0), (-1, 2), (0, -1), (2, -1))


def test_boundary_volume_uses_lattice_measure():
    assert fixture('interval').boundary_volume == 2
    assert fixture('simplex2').boundary_volume == 3
    assert fixture('cube').boundary_volume == 24


def test_reflexive():
    assert fixture('sym_interval').is_reflexive
    assert fixture('blp2').is_reflexive
    assert fixture('cube').is_reflexive
    assert not fixture('square').is_reflexive


def test_fixtures_are_delzant():
    assert all(check_delzant(fixture(name)) for name in FIXTURE_NAMES)


def test_non_delzant_triangle():
    assert not check_delzant(from_vertices([(-1, -1), (1, 0), (0, 1)]))


def test_unknown_fixture():
    with pytest.raises(ValidationError):
        fixture('dodecahedron')


def test_redundant_halfspaces_are_dropped():
    polytope = from_halfspaces([((1,), 0), ((-1,), 1), ((1,), 5), ((2,), 0)])
    assert len(polytope.halfspaces) == 2
    assert polytope.vertices == ((0,), (1,))


def test_rational_normals_are_made_primitive():
    polytope = from_halfspaces([(('1/2', 0), 0), ((0, 3), 0), ((-1, -1), 1)])
    assert polytope == fixture('simplex2')


def test_from_vertices_drops_interior_points():
    polytope = from_vertices([(0, 0), (1, 0), (0, 1), (1, 1), ('1/2', '1/2')])
    assert polytope == fixture('square')


def test_unbounded():
    with pytest.raises(UnboundedError):
        from_halfspaces([((1, 0), 0), ((0, 1), 0)])


def test_empty():
    with pytest.raises(EmptyPolytopeError):
        from_halfspaces([((1,), -2), ((-1,), 1)])


def test_not_full_dimensional():
    with pytest.raises(NotFullDimensionalError):
        from_vertices([(0, 0), (1, 1), (2, 2)])


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_triangulations_cover_the_polytope(name):
    polytope = fixture(name)
    reverse = list(reversed(range(len(polytope.vertices))))
    assert sum(s.volume for s in triangulate(polytope, reverse)) == polytope.volume


def test_triangulate_rejects_bad_order():
    with pytest.raises(ValidationError):
        triangulate(fixture('square'), [0, 0, 1, 2])


def test_dilate_and_translate():
    square = fixture('square')
    assert square.dilate(2).volume == 4
    moved = square.translate(('-1/2', '-1/2'))
    assert moved.contains((0, 0))
    assert not moved.contains((1, 0))


def test_refine_for_pl_splits_at_the_kink(step):
    cells = refine_for_pl(fixture('interval'), step)
    assert sorted(s.volume for s, _ in cells) == [Fraction(1, 2), Fraction(1, 2)]
    for simplex, piece in cells:
        for vertex in simplex.vertices:
            assert piece(vertex) == step(vertex)


def test_fixture_library():
    library = fixtures()
    assert tuple(library) == FIXTURE_NAMES
    assert len(library['blp2'].vertices) == 4


def test_lattice_measure_of_the_hypotenuse():
    simplex = fixture('simplex2')
    (chart,) = [c for c in simplex.facet_charts if c.facet.normal == (-1, -1)]
    assert chart.measure == 1
    euclidean = float(chart.measure) / chart.facet.lattice_density
    assert euclidean == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_representations_round_trip(name):
    polytope = fixture(name)
    hull = from_vertices(polytope.vertices)
    assert hull == polytope
    assert from_halfspaces(hull.halfspaces) == polytope


def test_random_hulls_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(5):
        points = rng.integers(-3, 4, size=(12, 3)).tolist()
        hull = from_vertices(points)
        assert from_halfspaces(hull.halfspaces) == hull
        assert from_vertices(hull.vertices) == hull
        assert all(hull.contains(p) for p in points)


def test_numpy_floats_are_read_exactly():
    assert to_fraction(np.float64(-0.875)) == Fraction(-7, 8)
    assert to_fraction(np.int64(3)) == 3
    assert to_fraction(0.1) == Fraction(1, 10)
    assert parse_rational(np.float64(0.1)) == Fraction(1, 10)


def test_exact_matrix_helpers():
    assert det([[2, 1], [1, 1]]) == 1
    assert det([['1/2', 0], [0, 4]]) == 2
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([]) == 0
    assert inverse_columns([[1, 2], [2, 4]]) is None
    assert inverse_columns([[2, 1], [1, 1]]) == [(1, -1), (-1, 2)]
