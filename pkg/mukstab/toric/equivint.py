"""Equivariant intersection numbers of a polarized toric variety as DH integrals.

With the Duistermaat–Heckman measure taken as the pushforward by minus the
moment map, every exponential intersection against ``[X]`` is an integral of
``e^{-<x, hbar xi>}`` over the polytope, and intersections against the
equivariant canonical class are minus the same integral over the boundary
with the lattice measure dσ.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mukstab.cache import init_cache
from mukstab.errors import ValidationError
from mukstab.models.params import Params
from mukstab.settings import settings
from mukstab.toric.expint import (
    as_covector,
    boundary_moments,
    complete_homogeneous,
    polytope_exp,
    polytope_moments,
    polytope_power_moment,
)
from mukstab.toric.polytope import Polytope

logger = logging.getLogger(__name__)

MAX_POWER = 6

moment_cache = init_cache(settings)


@dataclass(frozen=True)
class MomentSet:
    """DH and boundary moments at one effective covector ``s = hbar * xi``.

    ``interior[k]`` is ``int_P x^{(x)k} e^{-<x,s>} dμ`` and ``boundary[k]`` the
    same against dσ on the boundary.
    """

    xi_eff: np.ndarray
    interior: tuple[np.ndarray, ...]
    boundary: tuple[np.ndarray, ...]
    condition_estimate: float

    @property
    def I0(self) -> float:
        return float(self.interior[0])

    @property
    def I1(self) -> np.ndarray:
        return self.interior[1]

    @property
    def I2(self) -> np.ndarray:
        return self.interior[2]

    @property
    def I3(self) -> np.ndarray:
        if len(self.interior) < 4:
            raise ValidationError('third moments were not requested')
        return self.interior[3]

    @property
    def B0(self) -> float:
        return float(self.boundary[0])

    @property
    def B1(self) -> np.ndarray:
        return self.boundary[1]

    @property
    def B2(self) -> np.ndarray:
        if len(self.boundary) < 3:
            raise ValidationError('second boundary moments were not requested')
        return self.boundary[2]

    def first_moment(self, zeta) -> float:
        """``I1[zeta] = int <x, zeta> e^{-<x,s>} dμ``."""
        return float(self.I1 @ np.asarray(zeta, dtype=float))

    @cached_property
    def barycenter(self) -> np.ndarray:
        return self.I1 / self.I0

    @cached_property
    def covariance(self) -> np.ndarray:
        m = self.barycenter
        return self.I2 / self.I0 - np.outer(m, m)

    @property
    def boundary_ratio(self) -> float:
        return self.B0 / self.I0

    @property
    def boundary_barycenter(self) -> np.ndarray:
        """``B1 / I0``, the boundary first moment in units of the interior mass."""
        return self.B1 / self.I0

    @cached_property
    def boundary_covariance(self) -> np.ndarray:
        # int_dP (x - m)(x - m)^T e dσ / I0
        m = self.barycenter
        beta = self.boundary_barycenter
        return (
            self.B2 / self.I0
            - np.outer(beta, m)
            - np.outer(m, beta)
            + self.boundary_ratio * np.outer(m, m)
        )

    @cached_property
    def third_central_moment(self) -> np.ndarray:
        m = self.barycenter
        second = self.I2 / self.I0
        third = self.I3 / self.I0
        return (
            third
            - np.einsum('ab,c->abc', second, m)
            - np.einsum('ac,b->abc', second, m)
            - np.einsum('bc,a->abc', second, m)
            + 2.0 * np.einsum('a,b,c->abc', m, m, m)
        )


def moment_set(polytope: Polytope, xi_eff, order: int = 2) -> MomentSet:
    """Interior moments up to ``order`` and boundary moments up to ``order - 1``."""
    s = as_covector(xi_eff, polytope.dim)
    if order < 1:
        raise ValidationError('moment sets start at first moments')
    key = (polytope, s.tobytes(), order)
    cached = moment_cache.get(key)
    if cached is not None:
        return cached
    interior = polytope_moments(polytope, s, order)
    boundary = boundary_moments(polytope, s, order - 1)
    result = MomentSet(
        xi_eff=s,
        interior=interior.tensors,
        boundary=boundary.tensors,
        condition_estimate=max(
            interior.condition_estimate, boundary.condition_estimate
        ),
    )
    moment_cache.set(key, result)
    return result


def _check_dim(polytope: Polytope, params: Params) -> None:
    if params.dim != polytope.dim:
        raise ValidationError(
            f'xi has {params.dim} entries, polytope dimension is {polytope.dim}'
        )


def exp_intersection(polytope: Polytope, params: Params) -> float:
    _check_dim(polytope, params)
    return polytope_exp(polytope, params.xi_eff)


def power_intersection(polytope: Polytope, params: Params, k: int) -> float:
    """``(L^{n+k}; xi) = (n+k)!/k! * int_P (-<x, hbar xi>)^k dμ``."""
    _check_dim(polytope, params)
    if not 0 <= k <= MAX_POWER:
        raise ValidationError(f'power must lie in 0..{MAX_POWER}, got {k}')
    n = polytope.dim
    if k == 0:
        return math.factorial(n) * float(polytope.volume)
    moment = polytope_power_moment(polytope, params.xi_eff, k)
    return math.factorial(n + k) / math.factorial(k) * (-1) ** k * moment


def L_exp_intersection(polytope: Polytope, params: Params) -> float:
    _check_dim(polytope, params)
    moments = moment_set(polytope, params.xi_eff)
    return polytope.dim * moments.I0 - moments.first_moment(params.xi_eff)


def kappa_exp_intersection(polytope: Polytope, params: Params) -> float:
    _check_dim(polytope, params)
    return -moment_set(polytope, params.xi_eff).B0


def rescale_check(
    polytope: Polytope, params: Params, hbar: float
) -> tuple[float, float]:
    """``exp_intersection`` at (hbar, xi) and at (hbar', hbar / hbar' * xi)."""
    if hbar == 0:
        raise ValidationError('hbar must be nonzero')
    return (
        exp_intersection(polytope, params),
        exp_intersection(polytope, params.rescaled(hbar)),
    )


@dataclass(frozen=True)
class SeriesExpansion:
    partial_sums: tuple[float, ...]
    tail_bound: float
    value: float

    @property
    def error(self) -> float:
        return abs(self.partial_sums[-1] - self.value)


def series_partial_sums(
    polytope: Polytope, params: Params, terms: int
) -> SeriesExpansion:
    """Partial sums of ``sum_k (1/k!) int_P (-<x, hbar xi>)^k dμ``.

    ``tail_bound`` bounds the remainder after ``terms`` terms by
    ``vol * R^{K+1} / (K+1)! * e^R`` with ``R = max_v |<v, hbar xi>|``.
    """
    _check_dim(polytope, params)
    if terms < 0:
        raise ValidationError('number of terms must be non-negative')
    s = params.xi_eff
    per_degree = [[] for _ in range(terms + 1)]
    for simplex in polytope.simplices:
        d = simplex.dim
        h = complete_homogeneous(-(simplex.points @ s), terms)
        weight = math.factorial(d) * float(simplex.volume)
        for k in range(terms + 1):
            per_degree[k].append(weight * h[k] / math.factorial(d + k))
    partial, running = [], []
    for k in range(terms + 1):
        running.extend(per_degree[k])
        partial.append(math.fsum(running))

    radius = max(abs(float(v @ s)) for v in polytope.points)
    volume = float(polytope.volume)
    tail = (
        volume
        * math.exp(
            (terms + 1) * math.log(radius) - math.lgamma(terms + 2) + radius
        )
        if radius > 0
        else 0.0
    )
    return SeriesExpansion(
        partial_sums=tuple(partial),
        tail_bound=tail,
        value=exp_intersection(polytope, params),
    )
