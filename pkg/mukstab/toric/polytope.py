"""Exact rational polytopes: both representations, triangulation, facet charts.

A polytope is stored as halfspaces ``<x, u_F> >= -c_F`` with primitive integer
normals ``u_F`` and rational offsets ``c_F``, together with its vertices. All
of the geometry stays in ``Fraction`` arithmetic; floats only appear when the
integration code asks for ``Simplex.points``.
"""
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import cdd
import numpy as np

from mukstab.errors import (
    EmptyPolytopeError,
    NotDelzantError,
    NotFullDimensionalError,
    UnboundedError,
    ValidationError,
)
from mukstab.toric.linalg import (
    Vector,
    affine_rank,
    det,
    dot,
    inverse_columns,
    primitive,
    sub,
    to_fraction,
    to_vector,
)
from mukstab.toric.plfunction import AffinePiece, PLFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Halfspace:
    normal: tuple[int, ...]
    offset: Fraction

    def slack(self, point: Sequence) -> Fraction:
        return dot(self.normal, point) + self.offset


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: Fraction
    vertex_indices: tuple[int, ...]

    @property
    def lattice_density(self) -> float:
        # Euclidean (n-1)-measure times this factor is the lattice measure dσ
        return 1.0 / math.sqrt(sum(u * u for u in self.normal))


@dataclass(frozen=True)
class Simplex:
    """A simplex together with the measure it carries.

    Full-dimensional simplices carry their Lebesgue volume; simplices lifted
    from facet charts carry their lattice-normalised measure dσ.
    """

    vertices: tuple[Vector, ...]
    volume: Fraction

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence]) -> 'Simplex':
        vertices = tuple(to_vector(v) for v in vertices)
        dim = len(vertices) - 1
        ambient = len(vertices[0])
        if ambient != dim:
            raise ValidationError(f'R^{ambient} simplices have {ambient + 1} vertices')
        determinant = det([sub(v, vertices[0]) for v in vertices[1:]])
        if determinant == 0:
            raise ValidationError('simplex vertices are affinely dependent')
        return cls(
            vertices=vertices,
            volume=abs(determinant) / math.factorial(dim),
        )

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @cached_property
    def points(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices], dtype=float)


@dataclass(frozen=True)
class Polytope:
    dim: int
    halfspaces: tuple[Halfspace, ...]
    vertices: tuple[Vector, ...]
    facet_of_vertex: tuple[tuple[int, ...], ...]

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        return tuple(
            Facet(
                normal=h.normal,
                offset=h.offset,
                vertex_indices=tuple(
                    i
                    for i, incident in enumerate(self.facet_of_vertex)
                    if f in incident
                ),
            )
            for f, h in enumerate(self.halfspaces)
        )

    @cached_property
    def simplices(self) -> tuple[Simplex, ...]:
        return tuple(triangulate(self))

    @cached_property
    def volume(self) -> Fraction:
        return sum((s.volume for s in self.simplices), Fraction(0))

    @cached_property
    def facet_charts(self) -> tuple['FacetChart', ...]:
        return tuple(facet_polytopes(self))

    @cached_property
    def boundary_volume(self) -> Fraction:
        """Lattice-normalised volume of the boundary."""
        return sum((chart.measure for chart in self.facet_charts), Fraction(0))

    @cached_property
    def points(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices], dtype=float)

    @property
    def is_reflexive(self) -> bool:
        return all(h.offset == 1 for h in self.halfspaces)

    def contains(self, point: Sequence) -> bool:
        point = to_vector(point)
        return all(h.slack(point) >= 0 for h in self.halfspaces)

    def dilate(self, tau) -> 'Polytope':
        tau = to_fraction(tau)
        if tau <= 0:
            raise ValidationError(f'dilation factor must be positive, got {tau}')
        return Polytope(
            dim=self.dim,
            halfspaces=tuple(
                Halfspace(h.normal, h.offset * tau) for h in self.halfspaces
            ),
            vertices=tuple(tuple(tau * x for x in v) for v in self.vertices),
            facet_of_vertex=self.facet_of_vertex,
        )

    def translate(self, shift: Sequence) -> 'Polytope':
        shift = to_vector(shift)
        return Polytope(
            dim=self.dim,
            halfspaces=tuple(
                Halfspace(h.normal, h.offset - dot(h.normal, shift))
                for h in self.halfspaces
            ),
            vertices=tuple(
                tuple(x + s for x, s in zip(v, shift)) for v in self.vertices
            ),
            facet_of_vertex=self.facet_of_vertex,
        )


@dataclass(frozen=True)
class FacetChart:
    """A facet drawn in the coordinate chart that forgets axis ``axis``.

    ``density`` converts Lebesgue measure of the chart into dσ, so that
    ``chart.volume * density`` is the lattice measure of the facet. For a
    one-dimensional polytope the facet is a point and ``chart`` is ``None``.
    """

    facet: Facet
    chart: Polytope | None
    density: Fraction
    axis: int
    point: Vector | None = None

    @property
    def origin(self) -> Vector:
        u = self.facet.normal
        origin = [Fraction(0)] * len(u)
        origin[self.axis] = -self.facet.offset / u[self.axis]
        return tuple(origin)

    @property
    def basis(self) -> tuple[Vector, ...]:
        """Images of the chart's unit vectors under the linear part of ``lift``."""
        u = self.facet.normal
        columns = []
        for j in range(len(u)):
            if j == self.axis:
                continue
            column = [Fraction(0)] * len(u)
            column[j] = Fraction(1)
            column[self.axis] = Fraction(-u[j], u[self.axis])
            columns.append(tuple(column))
        return tuple(columns)

    def lift(self, point: Sequence) -> Vector:
        u = self.facet.normal
        coords = list(to_vector(point))
        coords.insert(self.axis, Fraction(0))
        rest = sum((u[j] * coords[j] for j in range(len(u)) if j != self.axis), 0)
        coords[self.axis] = (-self.facet.offset - rest) / u[self.axis]
        return tuple(coords)

    @cached_property
    def measure(self) -> Fraction:
        if self.chart is None:
            return self.density
        return self.chart.volume * self.density

    @cached_property
    def simplices(self) -> tuple[Simplex, ...]:
        if self.chart is None:
            return (Simplex(vertices=(self.point,), volume=self.density),)
        return tuple(self._lift_simplex(s) for s in self.chart.simplices)

    def refine(self, q: PLFunction) -> list[tuple[Simplex, AffinePiece]]:
        """Split the facet into simplices on which one piece of ``q`` is maximal."""
        if self.chart is None:
            return [(self.simplices[0], q.active_piece(self.point))]
        pulled = [piece.pullback(self.origin, self.basis) for piece in q.pieces]
        ambient = {}
        for chart_piece, piece in zip(pulled, q.pieces):
            ambient.setdefault(chart_piece, piece)
        cells = refine_for_pl(self.chart, PLFunction.from_pieces(pulled))
        return [(self._lift_simplex(s), ambient[piece]) for s, piece in cells]

    def _lift_simplex(self, simplex: Simplex) -> Simplex:
        return Simplex(
            vertices=tuple(self.lift(v) for v in simplex.vertices),
            volume=simplex.volume * self.density,
        )


def _normalize(halfspaces: Iterable) -> tuple[int, list[Halfspace]]:
    pairs = []
    for item in halfspaces:
        if isinstance(item, Halfspace):
            pairs.append((item.normal, item.offset))
        else:
            normal, offset = item
            pairs.append((normal, offset))
    if not pairs:
        raise ValidationError('at least one halfspace is required')
    dims = {len(normal) for normal, _ in pairs}
    if len(dims) != 1:
        raise ValidationError(f'halfspace normals have mixed dimensions {sorted(dims)}')
    dim = dims.pop()
    if dim < 1:
        raise ValidationError('polytope dimension must be positive')

    tightest: dict[tuple[int, ...], Fraction] = {}
    for normal, offset in pairs:
        normal, offset = to_vector(normal), to_fraction(offset)
        if not any(normal):
            if offset < 0:
                raise EmptyPolytopeError('constraint 0 >= -c with c < 0 is infeasible')
            continue
        integral, factor = primitive(normal)
        scaled = offset * factor
        if integral not in tightest or scaled < tightest[integral]:
            tightest[integral] = scaled
    return dim, [Halfspace(u, c) for u, c in sorted(tightest.items())]


def _cdd_matrix(rows: list[list], rep_type) -> cdd.Matrix:
    matrix = cdd.Matrix(rows, number_type='fraction')
    matrix.rep_type = rep_type
    return matrix


def _enumerate_vertices(halfspaces: list[Halfspace]) -> list[Vector]:
    """Vertices of ``<x, u> + c >= 0`` by double description."""
    if not halfspaces:
        raise UnboundedError('no halfspace constrains the ambient space')
    inequalities = _cdd_matrix(
        [[h.offset, *h.normal] for h in halfspaces], cdd.RepType.INEQUALITY
    )
    generators = cdd.Polyhedron(inequalities).get_generators()
    if generators.row_size == 0:
        raise EmptyPolytopeError('halfspaces have no common point')
    if generators.lin_set:
        raise UnboundedError('the halfspaces contain a whole line')
    vertices = []
    for i in range(generators.row_size):
        kind, *coords = generators[i]
        if kind == 0:
            raise UnboundedError(f'recession cone contains direction {tuple(coords)}')
        vertices.append(to_vector(coords))
    return sorted(set(vertices))


def _assemble(dim: int, facets: list[Halfspace], vertices: list[Vector]) -> Polytope:
    facets = sorted(facets)
    vertices = sorted(vertices)
    incidence = tuple(
        tuple(f for f, h in enumerate(facets) if h.slack(v) == 0) for v in vertices
    )
    return Polytope(
        dim=dim,
        halfspaces=tuple(facets),
        vertices=tuple(vertices),
        facet_of_vertex=incidence,
    )


def from_halfspaces(halfspaces: Iterable) -> Polytope:
    """Build a polytope from ``(normal, offset)`` pairs meaning ``<x, u> >= -c``.

    Normals may be rational; they are rescaled to primitive integer vectors
    (with the offset rescaled alongside) and redundant constraints are dropped.
    """
    dim, candidates = _normalize(halfspaces)
    vertices = _enumerate_vertices(candidates)
    if affine_rank(vertices) < dim:
        raise NotFullDimensionalError(
            f'vertices span an affine space of dimension '
            f'{affine_rank(vertices)} < {dim}'
        )
    facets = [
        h
        for h in candidates
        if affine_rank([v for v in vertices if h.slack(v) == 0]) == dim - 1
    ]
    return _assemble(dim, facets, vertices)


def from_vertices(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of a finite point set spanning the ambient space."""
    points = sorted({to_vector(p) for p in points})
    if not points:
        raise ValidationError('at least one point is required')
    dim = len(points[0])
    if any(len(p) != dim for p in points):
        raise ValidationError('points have mixed dimensions')
    if affine_rank(points) < dim:
        raise NotFullDimensionalError('points do not span the ambient space affinely')

    generators = _cdd_matrix([[1, *p] for p in points], cdd.RepType.GENERATOR)
    inequalities = cdd.Polyhedron(generators).get_inequalities()
    rows = [inequalities[i] for i in range(inequalities.row_size)]
    return from_halfspaces([(row[1:], row[0]) for row in rows])


def triangulate(
    polytope: Polytope, order: Sequence[int] | None = None
) -> list[Simplex]:
    """Pulling triangulation: cone every face from its earliest vertex.

    ``order`` is a permutation of the vertex indices deciding which vertex is
    pulled first; different orders give different triangulations of the same
    polytope.
    """
    n_vertices = len(polytope.vertices)
    if order is None:
        order = range(n_vertices)
    position = {v: i for i, v in enumerate(order)}
    if sorted(position) != list(range(n_vertices)):
        raise ValidationError('order must be a permutation of the vertex indices')

    facet_sets = [frozenset(f.vertex_indices) for f in polytope.facets]
    memo: dict[frozenset, list[tuple[int, ...]]] = {}

    def subfaces(face: frozenset, dim: int) -> list[frozenset]:
        found = set()
        for facet in facet_sets:
            candidate = face & facet
            if candidate == face or candidate in found:
                continue
            if affine_rank([polytope.vertices[i] for i in candidate]) == dim - 1:
                found.add(candidate)
        return sorted(found, key=lambda s: sorted(s))

    def pull(face: frozenset, dim: int) -> list[tuple[int, ...]]:
        if face in memo:
            return memo[face]
        if dim == 0:
            result = [tuple(face)]
        else:
            apex = min(face, key=position.__getitem__)
            result = [
                (apex, *cell)
                for sub_face in subfaces(face, dim)
                if apex not in sub_face
                for cell in pull(sub_face, dim - 1)
            ]
        memo[face] = result
        return result

    cells = pull(frozenset(range(n_vertices)), polytope.dim)
    simplices = [
        Simplex.from_vertices([polytope.vertices[i] for i in cell])
        for cell in sorted(cells, key=sorted)
    ]
    return simplices


def refine_for_pl(
    polytope: Polytope, q: PLFunction
) -> list[tuple[Simplex, AffinePiece]]:
    """Triangulate ``polytope`` so that one piece of ``q`` is maximal on each simplex.

    A piece that is maximal only on a set of measure zero contributes no
    simplices and is silently dropped.
    """
    pieces = q.pieces
    if len(pieces) == 1:
        return [(s, pieces[0]) for s in polytope.simplices]
    cells = []
    for i, piece in enumerate(pieces):
        constraints = list(polytope.halfspaces)
        for j, other in enumerate(pieces):
            if j == i:
                continue
            normal = tuple(a - b for a, b in zip(piece.gradient, other.gradient))
            constraints.append((normal, piece.constant - other.constant))
        try:
            region = from_halfspaces(constraints)
        except (EmptyPolytopeError, NotFullDimensionalError):
            logger.debug('piece %d of %s is not maximal on an open set', i, q)
            continue
        cells.extend((s, piece) for s in region.simplices)
    return cells


def facet_polytopes(polytope: Polytope) -> list[FacetChart]:
    charts = []
    for facet in polytope.facets:
        axis = next(k for k, u in enumerate(facet.normal) if u != 0)
        density = Fraction(1, abs(facet.normal[axis]))
        if polytope.dim == 1:
            (index,) = facet.vertex_indices
            charts.append(
                FacetChart(
                    facet=facet,
                    chart=None,
                    density=density,
                    axis=axis,
                    point=polytope.vertices[index],
                )
            )
            continue
        projected = [
            tuple(x for k, x in enumerate(polytope.vertices[i]) if k != axis)
            for i in facet.vertex_indices
        ]
        charts.append(
            FacetChart(
                facet=facet,
                chart=from_vertices(projected),
                density=density,
                axis=axis,
            )
        )
    return charts


def vertex_edge_generators(polytope: Polytope) -> list[tuple[tuple[int, ...], ...]]:
    """Primitive inward edge directions at every vertex of a simple polytope."""
    generators = []
    for vertex, incident in zip(polytope.vertices, polytope.facet_of_vertex):
        if len(incident) != polytope.dim:
            raise NotDelzantError(f'vertex {vertex} lies on {len(incident)} facets')
        normals = [polytope.halfspaces[f].normal for f in incident]
        columns = inverse_columns(normals)
        generators.append(tuple(primitive(column)[0] for column in columns))
    return generators


def check_delzant(polytope: Polytope) -> bool:
    """Whether every vertex cone is generated by a lattice basis."""
    try:
        generators = vertex_edge_generators(polytope)
    except NotDelzantError:
        return False
    return all(abs(det(edges)) == 1 for edges in generators)
