"""Integrals of ``e^{-<x, s>}`` times low-degree polynomials over polytopes.

Every integral over a simplex ``S`` with vertices ``v_0..v_d`` reduces to
divided differences of ``t -> e^t`` at the nodes ``a_i = -<v_i, s>``::

    int_S e^{-<x, s>} dx = d! vol(S) dd[a_0, ..., a_d]

and moments come from differentiating in ``s``, which repeats nodes. The
covector ``s`` is always the effective one, ``hbar * xi``.
"""
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement, product

import numpy as np

from mukstab.errors import (
    DegenerateDirectionError,
    ExponentOverflowError,
    NotDelzantError,
    ValidationError,
)
from mukstab.toric.plfunction import AffinePiece, PLFunction
from mukstab.toric.polytope import (
    Polytope,
    Simplex,
    check_delzant,
    refine_for_pl,
    triangulate,
    vertex_edge_generators,
)

logger = logging.getLogger(__name__)

MAX_EXPONENT = 700.0
# absolute spread below which nodes use the Taylor series; stands in for the
# relative rule gap < 1e-5 * (1 + max|a|), which leaves gaps near 1e-5 to the
# recursion
CLUSTER_SPREAD = 1.0
TAYLOR_ORDER = 16
MAX_MOMENT_ORDER = 3
QUADRATURE_POINTS = 16

BRION_POLE_TOLERANCE = 1e-9
BRION_MAX_CANCELLATION = 1e4
BRION_NODES = 64
BRION_RADII = (1.0, 0.7, 1.4, 0.5, 2.0)
BRION_TOLERANCE = 1e-10


class IntegrationMethod(str, Enum):
    divided_difference = 'divided_difference'
    taylor_cluster = 'taylor_cluster'


@dataclass(frozen=True)
class ExpIntegralResult:
    value: float
    method: IntegrationMethod
    condition_estimate: float


@dataclass(frozen=True)
class MomentTensors:
    """``tensors[k]`` is the order-``k`` moment tensor ``int x^{(x)k} e^{-<x,s>}``."""

    tensors: tuple[np.ndarray, ...]
    condition_estimate: float

    @property
    def order(self) -> int:
        return len(self.tensors) - 1

    def __getitem__(self, k: int) -> np.ndarray:
        return self.tensors[k]


def as_covector(values, dim: int) -> np.ndarray:
    covector = np.asarray(values, dtype=float).reshape(-1)
    if covector.shape != (dim,):
        raise ValidationError(
            f'covector has {covector.size} entries, polytope dimension is {dim}'
        )
    if not np.all(np.isfinite(covector)):
        raise ValidationError(f'covector {covector.tolist()} has non-finite entries')
    return covector


def complete_homogeneous(values: Sequence[float], degree: int) -> list[float]:
    """``[h_0, ..., h_degree]`` of the complete homogeneous symmetric polynomials."""
    h = [1.0] + [0.0] * degree
    for y in values:
        for k in range(1, degree + 1):
            h[k] += y * h[k - 1]
    return h


def _taylor_cluster(nodes: Sequence[float]) -> float:
    # dd[c + y_0, ..., c + y_m] = e^c * sum_k h_k(y) / (m + k)!
    center = math.fsum(nodes) / len(nodes)
    m = len(nodes) - 1
    h = complete_homogeneous([z - center for z in nodes], TAYLOR_ORDER)
    series = math.fsum(h[k] / math.factorial(m + k) for k in range(TAYLOR_ORDER + 1))
    return math.exp(center) * series


def exp_divided_difference(nodes: Sequence[float]) -> ExpIntegralResult:
    """Divided difference of ``exp`` at ``nodes`` (repeated nodes allowed)."""
    z = sorted(float(a) for a in nodes)
    if not z:
        raise ValidationError('divided difference needs at least one node')
    if max(abs(z[0]), abs(z[-1])) > MAX_EXPONENT:
        raise ExponentOverflowError(
            f'exponent {max(z, key=abs):.6g} is out of double range'
        )

    memo: dict[tuple[int, int], tuple[float, float]] = {}

    def dd(lo: int, hi: int) -> tuple[float, float]:
        if (lo, hi) in memo:
            return memo[lo, hi]
        spread = z[hi] - z[lo]
        if spread <= CLUSTER_SPREAD:
            result = _taylor_cluster(z[lo : hi + 1]), 1.0
        else:
            upper, upper_cond = dd(lo + 1, hi)
            lower, lower_cond = dd(lo, hi - 1)
            difference = upper - lower
            value = difference / spread
            scale = abs(upper) * upper_cond + abs(lower) * lower_cond
            condition = scale / abs(difference) if difference else math.inf
            result = value, condition
        memo[lo, hi] = result
        return result

    value, condition = dd(0, len(z) - 1)
    method = (
        IntegrationMethod.taylor_cluster
        if z[-1] - z[0] <= CLUSTER_SPREAD
        else IntegrationMethod.divided_difference
    )
    return ExpIntegralResult(value=value, method=method, condition_estimate=condition)


def _zero_nodes_weight(d: int, k: int) -> float:
    # dd of exp at d + k + 1 coincident zero nodes
    return 1.0 / math.factorial(d + k)


def simplex_moments(
    simplex: Simplex, xi_eff: Sequence[float], order: int = 0
) -> tuple[list[np.ndarray], float]:
    """Moment tensors of orders ``0..order`` of ``e^{-<x, s>}`` over a simplex.

    Returns the tensors and the worst condition estimate of the divided
    differences involved. At ``s = 0`` no exponential is evaluated.
    """
    if not 0 <= order <= MAX_MOMENT_ORDER:
        raise ValidationError(f'moment order must lie in 0..{MAX_MOMENT_ORDER}')
    s = np.asarray(xi_eff, dtype=float)
    vertices = simplex.points
    d = simplex.dim
    scale = math.factorial(d) * float(simplex.volume)
    zero = not np.any(s)
    nodes = [0.0] * (d + 1) if zero else list(-(vertices @ s))
    condition = 0.0

    def weight(extra: tuple[int, ...]) -> float:
        nonlocal condition
        multiplicity = math.prod(
            math.factorial(extra.count(i)) for i in set(extra)
        )
        if zero:
            return multiplicity * _zero_nodes_weight(d, len(extra))
        result = exp_divided_difference(nodes + [nodes[i] for i in extra])
        condition = max(condition, result.condition_estimate)
        return multiplicity * result.value

    tensors = [np.array(float(simplex.volume) if zero else scale * weight(()))]
    for k in range(1, order + 1):
        weights = {
            extra: weight(extra)
            for extra in combinations_with_replacement(range(d + 1), k)
        }
        full = np.empty((d + 1,) * k)
        for index in product(range(d + 1), repeat=k):
            full[index] = weights[tuple(sorted(index))]
        if k == 1:
            tensor = vertices.T @ full
        elif k == 2:
            tensor = np.einsum('ij,ia,jb->ab', full, vertices, vertices)
        else:
            tensor = np.einsum(
                'ijk,ia,jb,kc->abc', full, vertices, vertices, vertices
            )
        tensors.append(scale * tensor)
    return tensors, max(condition, 1.0)


def simplex_exp(simplex: Simplex, xi_eff: Sequence[float]) -> float:
    s = np.asarray(xi_eff, dtype=float)
    if not np.any(s):
        return float(simplex.volume)
    nodes = -(simplex.points @ s)
    result = exp_divided_difference(nodes)
    return math.factorial(simplex.dim) * float(simplex.volume) * result.value


def _as_piece(affine, dim: int) -> AffinePiece:
    if isinstance(affine, AffinePiece):
        return affine
    if isinstance(affine, PLFunction):
        if not affine.is_affine:
            raise ValidationError(f'{affine} is not affine')
        return affine.pieces[0]
    gradient, constant = affine
    piece = PLFunction.affine(gradient, constant).pieces[0]
    if piece.dim != dim:
        raise ValidationError(f'affine function on R^{piece.dim}, expected R^{dim}')
    return piece


def simplex_exp_affine(simplex: Simplex, xi_eff: Sequence[float], affine) -> float:
    """``int_S l(x) e^{-<x, s>} dx`` for an affine ``l``."""
    piece = _as_piece(affine, len(simplex.vertices[0]))
    (m0, m1), _ = simplex_moments(simplex, xi_eff, order=1)
    return float(piece.gradient_array @ m1) + float(piece.constant) * float(m0)


def simplex_power_moment(simplex: Simplex, zeta: Sequence[float], k: int) -> float:
    """Unweighted ``int_S <x, zeta>^k dx = d! vol k! h_k(b) / (d + k)!``."""
    b = simplex.points @ np.asarray(zeta, dtype=float)
    h = complete_homogeneous(b, k)[k]
    d = simplex.dim
    return (
        float(simplex.volume)
        * math.factorial(d)
        * math.factorial(k)
        * h
        / math.factorial(d + k)
    )


def simplex_quadrature(
    simplex: Simplex, points: int = QUADRATURE_POINTS
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_S g`` against the measure ``S`` carries.

    Gauss-Legendre in collapsed coordinates: ``points`` nodes per axis, so a
    tensor grid of ``points ** dim`` nodes.
    """
    d = simplex.dim
    if d == 0:
        return simplex.points, np.array([float(simplex.volume)])
    t, w = np.polynomial.legendre.leggauss(points)
    t, w = (t + 1.0) / 2.0, w / 2.0
    grid = np.array(list(product(range(points), repeat=d)))
    u, weights = t[grid], np.prod(w[grid], axis=1)
    barycentric = np.empty((len(u), d + 1))
    remaining = np.ones(len(u))
    for i in range(d):
        barycentric[:, i + 1] = remaining * u[:, i]
        remaining = remaining * (1.0 - u[:, i])
    barycentric[:, 0] = remaining
    jacobian = np.prod([(1.0 - u[:, i]) ** (d - 1 - i) for i in range(d)], axis=0)
    scale = math.factorial(d) * float(simplex.volume)
    return barycentric @ simplex.points, scale * weights * jacobian


def _fsum_tensors(tensors: list[np.ndarray]) -> np.ndarray:
    stacked = np.stack(tensors)
    flat = stacked.reshape(len(tensors), -1)
    summed = [math.fsum(flat[:, j]) for j in range(flat.shape[1])]
    return np.array(summed).reshape(stacked.shape[1:])


def integrate_simplices(
    simplices: Sequence[Simplex], xi_eff: Sequence[float], order: int
) -> MomentTensors:
    """Sum the moment tensors of ``simplices`` in their given order."""
    per_simplex = []
    condition = 1.0
    for simplex in simplices:
        tensors, cond = simplex_moments(simplex, xi_eff, order)
        per_simplex.append(tensors)
        condition = max(condition, cond)
    return MomentTensors(
        tensors=tuple(
            _fsum_tensors([tensors[k] for tensors in per_simplex])
            for k in range(order + 1)
        ),
        condition_estimate=condition,
    )


def boundary_simplices(polytope: Polytope) -> list[Simplex]:
    return [s for chart in polytope.facet_charts for s in chart.simplices]


def polytope_moments(
    polytope: Polytope, xi_eff: Sequence[float], order: int = 2
) -> MomentTensors:
    s = as_covector(xi_eff, polytope.dim)
    return integrate_simplices(polytope.simplices, s, order)


def boundary_moments(
    polytope: Polytope, xi_eff: Sequence[float], order: int = 2
) -> MomentTensors:
    """Moments against the lattice-normalised boundary measure dσ."""
    s = as_covector(xi_eff, polytope.dim)
    return integrate_simplices(boundary_simplices(polytope), s, order)


def polytope_exp(
    polytope: Polytope,
    xi_eff: Sequence[float],
    order: Sequence[int] | None = None,
) -> float:
    """``int_P e^{-<x, s>} dx``; ``order`` picks a different pulling triangulation."""
    s = as_covector(xi_eff, polytope.dim)
    simplices = polytope.simplices if order is None else triangulate(polytope, order)
    if not np.any(s):
        return float(polytope.volume)
    return math.fsum(simplex_exp(simplex, s) for simplex in simplices)


def polytope_exp_affine(polytope: Polytope, xi_eff: Sequence[float], affine) -> float:
    s = as_covector(xi_eff, polytope.dim)
    piece = _as_piece(affine, polytope.dim)
    return math.fsum(
        simplex_exp_affine(simplex, s, piece) for simplex in polytope.simplices
    )


def pl_moments(
    cells: Sequence[tuple[Simplex, AffinePiece]], xi_eff: Sequence[float]
) -> tuple[float, np.ndarray]:
    """``(int q e^{-<x,s>}, int q x e^{-<x,s>})`` over cells carrying their pieces."""
    s = np.asarray(xi_eff, dtype=float)
    zeroth, first = [], []
    for simplex, piece in cells:
        (m0, m1, m2), _ = simplex_moments(simplex, s, order=2)
        constant = float(piece.constant)
        zeroth.append(float(piece.gradient_array @ m1) + constant * float(m0))
        first.append(m2 @ piece.gradient_array + constant * m1)
    if not cells:
        return 0.0, np.zeros_like(s)
    return math.fsum(zeroth), _fsum_tensors(first)


def polytope_exp_pl(
    polytope: Polytope, xi_eff: Sequence[float], q: PLFunction
) -> float:
    """``int_P q e^{-<x, s>} dx``, summed over the cells of ``refine_for_pl``."""
    s = as_covector(xi_eff, polytope.dim)
    return math.fsum(
        simplex_exp_affine(simplex, s, piece)
        for simplex, piece in refine_for_pl(polytope, q)
    )


def polytope_exp_pl_moment(
    polytope: Polytope, xi_eff: Sequence[float], q: PLFunction
) -> np.ndarray:
    """``int_P q(x) x e^{-<x, s>} dx`` as an n-vector."""
    s = as_covector(xi_eff, polytope.dim)
    return pl_moments(refine_for_pl(polytope, q), s)[1]


def boundary_pl_cells(
    polytope: Polytope, q: PLFunction
) -> list[tuple[Simplex, AffinePiece]]:
    return [cell for chart in polytope.facet_charts for cell in chart.refine(q)]


def boundary_exp(polytope: Polytope, xi_eff: Sequence[float]) -> float:
    s = as_covector(xi_eff, polytope.dim)
    if not np.any(s):
        return float(polytope.boundary_volume)
    return math.fsum(
        simplex_exp(simplex, s) for simplex in boundary_simplices(polytope)
    )


def boundary_exp_pl(
    polytope: Polytope, xi_eff: Sequence[float], q: PLFunction
) -> float:
    s = as_covector(xi_eff, polytope.dim)
    return math.fsum(
        simplex_exp_affine(simplex, s, piece)
        for simplex, piece in boundary_pl_cells(polytope, q)
    )


def polytope_power_moment(polytope: Polytope, zeta: Sequence[float], k: int) -> float:
    """Unweighted ``int_P <x, zeta>^k dx``."""
    z = as_covector(zeta, polytope.dim)
    return math.fsum(simplex_power_moment(s, z, k) for s in polytope.simplices)


def _brion_terms(polytope: Polytope, edges: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Vertex terms of the vertex formula; ``s`` may be complex."""
    exponents = -(polytope.points @ s)
    worst = float(np.max(np.abs(exponents.real)))
    if worst > MAX_EXPONENT:
        raise ExponentOverflowError(f'exponent {worst:.6g} is out of double range')
    weights = np.abs(np.linalg.det(edges))
    return np.exp(exponents) * weights / np.prod(edges @ s, axis=1)


def _near_pole(edges: np.ndarray, s: np.ndarray) -> bool:
    threshold = BRION_POLE_TOLERANCE * (1.0 + float(np.linalg.norm(s)))
    return bool(np.any(np.abs(edges @ s) <= threshold))


def _brion_contour(polytope: Polytope, edges: np.ndarray, s: np.ndarray) -> float:
    """Mean of the vertex formula over circles around ``s`` in a complex line.

    The integral is entire along ``s + z w``, so its value at ``z = 0`` is the
    mean over any circle; the nodes are never real and miss every pole.
    """
    direction = np.array([math.pi**j for j in range(polytope.dim)])
    direction /= np.linalg.norm(direction)
    reach = max(1.0, float(np.max(np.abs(polytope.points @ direction))))
    angles = (np.arange(BRION_NODES) + 0.5) * (2.0 * math.pi / BRION_NODES)
    estimate = math.inf
    for factor in BRION_RADII:
        values, magnitude = [], 0.0
        for z in (factor / reach) * np.exp(1j * angles):
            terms = _brion_terms(polytope, edges, s + z * direction)
            values.append(math.fsum(terms.real))
            magnitude += float(np.sum(np.abs(terms)))
        full = math.fsum(values) / BRION_NODES
        half = math.fsum(values[::2]) / (BRION_NODES // 2)
        roundoff = 4.0 * np.finfo(float).eps * magnitude / BRION_NODES
        estimate = (abs(full - half) + roundoff) / abs(full)
        if estimate <= BRION_TOLERANCE:
            return full
        logger.info('contour radius %.3g: error estimate %.3g', factor, estimate)
    raise DegenerateDirectionError(
        f'vertex formula at {s.tolist()} has error estimate {estimate:.3g}'
    )


def brion_exp(polytope: Polytope, xi_eff: Sequence[float]) -> float:
    """Vertex-sum evaluation of ``int_P e^{-<x, s>} dx`` for Delzant polytopes.

    Near a pole hyperplane, or when the vertex terms cancel badly, the value
    is taken as a contour mean instead of the direct sum.
    """
    s = as_covector(xi_eff, polytope.dim)
    if not check_delzant(polytope):
        raise NotDelzantError('vertex formula needs a Delzant polytope')
    edges = np.array(vertex_edge_generators(polytope), dtype=float)
    if not _near_pole(edges, s):
        terms = _brion_terms(polytope, edges, s)
        value = math.fsum(terms)
        if math.fsum(np.abs(terms)) <= BRION_MAX_CANCELLATION * abs(value):
            return value
        logger.debug('vertex terms at %s cancel, using the contour mean', s.tolist())
    return _brion_contour(polytope, edges, s)
