"""μ-Futaki invariants of product and toric test configurations.

Everything is assembled from one :class:`MomentSet` at ``s = hbar * xi``. A
toric test configuration is a convex PL function ``q``; the product
configuration of ``zeta`` is the affine function ``-<x, hbar * zeta>``.
"""
import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from mukstab.errors import NotReflexiveError, ValidationError
from mukstab.models.geometry import PLFunctionModel, SamplerSpec
from mukstab.models.params import Params
from mukstab.models.reports import (
    FutakiBreakdown,
    FutakiReport,
    ScanReport,
    ScanSample,
)
from mukstab.settings import settings
from mukstab.toric.equivint import MomentSet, moment_set
from mukstab.toric.expint import (
    boundary_exp_pl,
    boundary_pl_cells,
    boundary_simplices,
    pl_moments,
    simplex_quadrature,
)
from mukstab.toric.plfunction import PLFunction
from mukstab.toric.polytope import Polytope, refine_for_pl

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Sign of the t-weighted correction in the relative invariant; +1 is the
# orientation for which lambda * xi_lambda tends to the extremal vector.
EXTREMAL_ORIENTATION = 1.0

# Scan coefficients are multiples of 1/SAMPLE_DENOMINATOR.
SAMPLE_DENOMINATOR = 8


def _check_dim(polytope: Polytope, params: Params) -> None:
    if params.dim != polytope.dim:
        raise ValidationError(
            f'xi has {params.dim} entries, polytope dimension is {polytope.dim}'
        )


def mean_s_from_moments(moments: MomentSet, lam: float) -> float:
    s = moments.xi_eff
    return TWO_PI * moments.boundary_ratio + lam * float(s @ moments.barycenter)


def mean_s(polytope: Polytope, params: Params) -> float:
    """``s-bar = 2π B0 / I0 + λ I1[hbar xi] / I0``."""
    _check_dim(polytope, params)
    return mean_s_from_moments(moment_set(polytope, params.xi_eff), params.lam)


def mu_character(polytope: Polytope, params: Params) -> float:
    """``μ̌ = 2π (κ.e^L) / (e^L) + λ ((L.e^L) / (e^L) - log (e^L))``."""
    _check_dim(polytope, params)
    moments = moment_set(polytope, params.xi_eff)
    s = moments.xi_eff
    normalised_l = polytope.dim - float(s @ moments.barycenter)
    return -TWO_PI * moments.boundary_ratio + params.lam * (
        normalised_l - math.log(moments.I0)
    )


def mu_gradient(moments: MomentSet, lam: float) -> np.ndarray:
    """Gradient of μ̌ in the effective covector ``s``."""
    m = moments.barycenter
    boundary = moments.boundary_barycenter - moments.boundary_ratio * m
    return TWO_PI * boundary + lam * (moments.covariance @ moments.xi_eff)


def _assemble(
    moments: MomentSet,
    params: Params,
    iq: float,
    bq: float,
    iq1: float,
) -> tuple[float, FutakiBreakdown]:
    i0, b0 = moments.I0, moments.B0
    s_i1 = moments.first_moment(moments.xi_eff)
    kappa_term = TWO_PI * (bq - b0 * iq / i0) / i0
    lambda_sigma_term = (iq1 - s_i1 * iq / i0) / i0
    value = kappa_term + params.lam * lambda_sigma_term
    breakdown = FutakiBreakdown(
        kappa_term=kappa_term,
        lambda_sigma_term=lambda_sigma_term,
        mean_s=mean_s_from_moments(moments, params.lam),
        I0=i0,
        B0=b0,
        Iq=iq,
        Bq=bq,
        Iq1=iq1,
    )
    return value, breakdown


def futaki_vector(polytope: Polytope, params: Params, zeta) -> FutakiReport:
    """``F̌ut(zeta) = -D_xi μ̌(zeta)`` from first and second moments.

    The breakdown is that of the product configuration ``q = -<x, hbar zeta>``.
    """
    _check_dim(polytope, params)
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (polytope.dim,):
        raise ValidationError(f'zeta must have {polytope.dim} entries')
    moments = moment_set(polytope, params.xi_eff)
    a = -params.hbar * zeta
    iq = float(a @ moments.I1)
    bq = float(a @ moments.B1)
    iq1 = float(moments.xi_eff @ moments.I2 @ a)
    value, breakdown = _assemble(moments, params, iq, bq, iq1)
    breakdown.per_hbar = value / params.hbar
    return FutakiReport(
        value=value,
        breakdown=breakdown,
        params=params,
        vector=zeta.tolist(),
    )


def futaki_toric(polytope: Polytope, q: PLFunction, params: Params) -> FutakiReport:
    """``2π Bq/I0 + λ Iq1/I0 - s-bar Iq/I0`` for a convex PL function ``q``."""
    _check_dim(polytope, params)
    if q.dim != polytope.dim:
        raise ValidationError(f'q lives on R^{q.dim}, polytope on R^{polytope.dim}')
    moments = moment_set(polytope, params.xi_eff)
    s = moments.xi_eff
    cells = refine_for_pl(polytope, q)
    iq, iq_x = pl_moments(cells, s)
    bq = boundary_exp_pl(polytope, s, q)
    iq1 = float(s @ iq_x)
    value, breakdown = _assemble(moments, params, iq, bq, iq1)
    breakdown.per_hbar = value / params.hbar
    return FutakiReport(
        value=value,
        breakdown=breakdown,
        params=params,
        pl_function=PLFunctionModel.from_pl(q),
    )


def donaldson_futaki(polytope: Polytope, q: PLFunction) -> float:
    """``(L^n) / 2π * F̌ut(q)`` at λ = 0, ξ = 0."""
    params = Params.zero(polytope.dim)
    degree = math.factorial(polytope.dim) * float(polytope.volume)
    return degree / TWO_PI * futaki_toric(polytope, q, params).value


def modified_futaki(polytope: Polytope, q: PLFunction, params: Params) -> float:
    """``I0 / 2π * F̌ut^{2π}(q)`` on a reflexive polytope."""
    if not polytope.is_reflexive:
        raise NotReflexiveError('modified Futaki needs a reflexive polytope')
    if not math.isclose(params.lam, TWO_PI, rel_tol=1e-12):
        raise ValidationError(f'modified Futaki needs lambda = 2π, got {params.lam}')
    report = futaki_toric(polytope, q, params)
    return report.breakdown.I0 / TWO_PI * report.value


def relative_futaki(polytope: Polytope, q: PLFunction, hbar: float, xi_ref) -> float:
    """Futaki invariant relative to the vector ``xi_ref``.

    ``F̌ut(q; 0, 0) + (1/vol) int_P q (<x, t> - <m, t>) dμ`` with ``t = hbar xi_ref``
    and ``m`` the barycenter of P.
    """
    params = Params.zero(polytope.dim, hbar=hbar)
    t = hbar * np.asarray(xi_ref, dtype=float)
    if t.shape != (polytope.dim,):
        raise ValidationError(f'xi_ref must have {polytope.dim} entries')
    base = futaki_toric(polytope, q, params).value
    moments = moment_set(polytope, np.zeros(polytope.dim))
    iq, iq_x = pl_moments(refine_for_pl(polytope, q), np.zeros(polytope.dim))
    centered = float(t @ iq_x) - float(t @ moments.barycenter) * iq
    return base + EXTREMAL_ORIENTATION * centered / moments.I0


def kahler_futaki(polytope: Polytope, q: PLFunction, lam: float, xi) -> float:
    """``Fut^λ_ξ = 2 F̌ut^λ_{-2.ξ}``."""
    params = Params(lam=lam, hbar=-2.0, xi=tuple(float(x) for x in xi))
    return 2.0 * futaki_toric(polytope, q, params).value



Weight = Callable[[np.ndarray], np.ndarray]


def mu_weights(params: Params) -> tuple[Weight, Weight]:
    """The weights ``v = e^{-<x, s>}`` and ``w = λ <x, s> v`` at ``s = hbar xi``.

    With these, :func:`weighted_futaki` reproduces :func:`futaki_toric`.
    """
    s, lam = params.xi_eff, params.lam

    def v(x: np.ndarray) -> np.ndarray:
        return np.exp(-(x @ s))

    def w(x: np.ndarray) -> np.ndarray:
        return lam * (x @ s) * np.exp(-(x @ s))

    return v, w


def _integrate(simplices, weight: Weight) -> float:
    parts = []
    for simplex in simplices:
        points, weights = simplex_quadrature(simplex)
        parts.append(float(weights @ weight(points)))
    return math.fsum(parts)


def _integrate_pl(cells, weight: Weight) -> float:
    parts = []
    for simplex, piece in cells:
        points, weights = simplex_quadrature(simplex)
        q = points @ piece.gradient_array + float(piece.constant)
        parts.append(float(weights @ (q * weight(points))))
    return math.fsum(parts)


def weighted_futaki(polytope: Polytope, q: PLFunction, v: Weight, w: Weight) -> float:
    """Weighted Futaki invariant of ``q`` for weights ``v > 0`` and ``w`` on P.

    ``(2π int_∂P q v dσ + int_P q w - c int_P q v) / int_P v`` with the constant
    ``c = (2π int_∂P v dσ + int_P w) / int_P v``. The weights take an ``(m, n)``
    array of points and return ``m`` values; integrals are by quadrature.
    """
    if q.dim != polytope.dim:
        raise ValidationError(f'q lives on R^{q.dim}, polytope on R^{polytope.dim}')
    boundary = boundary_simplices(polytope)
    total_v = _integrate(polytope.simplices, v)
    if not total_v > 0:
        raise ValidationError('weight v must integrate to a positive number')
    c = (TWO_PI * _integrate(boundary, v) + _integrate(polytope.simplices, w)) / total_v
    cells = refine_for_pl(polytope, q)
    bq = _integrate_pl(boundary_pl_cells(polytope, q), v)
    value = TWO_PI * bq + _integrate_pl(cells, w) - c * _integrate_pl(cells, v)
    return value / total_v


def _sample_configuration(
    polytope: Polytope, sampler: SamplerSpec, rng: np.random.Generator
) -> PLFunction:
    bound = math.floor(sampler.coeff_bound * SAMPLE_DENOMINATOR)
    count = int(rng.integers(1, sampler.max_pieces + 1))
    numerators = rng.integers(-bound, bound + 1, size=(count, polytope.dim + 1))
    q = PLFunction.from_pieces(
        (
            [Fraction(int(a), SAMPLE_DENOMINATOR) for a in row[:-1]],
            Fraction(int(row[-1]), SAMPLE_DENOMINATOR),
        )
        for row in numerators
    )
    # constants do not change the invariant; pin min over vertices to 0
    return q.shift(-min(q(v) for v in polytope.vertices))


def sample_configurations(polytope: Polytope, sampler: SamplerSpec) -> list[PLFunction]:
    rng = np.random.default_rng(sampler.seed)
    return [
        _sample_configuration(polytope, sampler, rng) for _ in range(sampler.count)
    ]


def semistability_scan(
    polytope: Polytope, params: Params, sampler: SamplerSpec
) -> ScanReport:
    """Evaluate F̌ut on random convex PL functions, smallest value first."""
    _check_dim(polytope, params)
    configurations = sample_configurations(polytope, sampler)
    # warm the moment cache before fanning out
    moment_set(polytope, params.xi_eff)

    def evaluate(q: PLFunction) -> float:
        return futaki_toric(polytope, q, params).value

    with ThreadPoolExecutor(max_workers=max(1, settings.threads)) as executor:
        values = list(executor.map(evaluate, configurations))

    samples = sorted(
        (
            ScanSample(index=i, q=PLFunctionModel.from_pl(q), value=value)
            for i, (q, value) in enumerate(zip(configurations, values))
        ),
        key=lambda sample: (sample.value, sample.index),
    )
    logger.info(
        'scanned %d configurations, min %.6g', len(samples), samples[0].value
    )
    return ScanReport(
        params=params,
        samples=samples,
        min_value=samples[0].value,
        argmin=samples[0].q,
    )
