"""Critical points of the μ-volume functional μ̌^λ over ξ.

Newton iterations run in the effective covector ``s = hbar * xi`` where the
moment formulas live; results are reported back in ``xi``.
"""
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import minimize

from mukstab.errors import (
    ExponentOverflowError,
    MaxIterationsError,
    NotReflexiveError,
    SingularGramError,
    ValidationError,
)
from mukstab.models.geometry import PLFunctionModel
from mukstab.models.params import Params
from mukstab.models.reports import (
    CriticalPoint,
    CriticalStatus,
    LimitDiagnostics,
    LimitSample,
)
from mukstab.settings import settings
from mukstab.toric.equivint import MomentSet, moment_set
from mukstab.toric.futaki import (
    TWO_PI,
    futaki_toric,
    mu_gradient,
    relative_futaki,
)
from mukstab.toric.plfunction import PLFunction
from mukstab.toric.polytope import Polytope

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 200
DEDUP_DISTANCE = 1e-6
MULTISTART_RADIUS = 5.0
ARMIJO = 1e-4
MAX_HALVINGS = 60
BARYCENTER_TOL = 1e-8
DEFAULT_SCHEDULE = (-10.0, -100.0, -1000.0, -10000.0)


def weighted_barycenter(polytope: Polytope, xi_eff) -> np.ndarray:
    """``int_P x e^{-<x, s>} dμ / int_P e^{-<x, s>} dμ``."""
    return moment_set(polytope, xi_eff).barycenter


def mu_hessian(moments: MomentSet, lam: float) -> np.ndarray:
    """Hessian of μ̌ in the effective covector ``s``."""
    covariance = moments.covariance
    boundary = moments.boundary_ratio * covariance - moments.boundary_covariance
    skew = np.einsum('abc,c->ab', moments.third_central_moment, moments.xi_eff)
    hessian = TWO_PI * boundary + lam * (covariance - skew)
    return 0.5 * (hessian + hessian.T)


def grad_mu(polytope: Polytope, params: Params) -> np.ndarray:
    """``D_xi μ̌``; component j equals ``-F̌ut(e_j)``."""
    moments = moment_set(polytope, params.xi_eff)
    return params.hbar * mu_gradient(moments, params.lam)


def hessian_mu(polytope: Polytope, params: Params) -> np.ndarray:
    moments = moment_set(polytope, params.xi_eff, order=3)
    return params.hbar**2 * mu_hessian(moments, params.lam)


def _newton(
    polytope: Polytope,
    lam: float,
    hbar: float,
    start: np.ndarray,
    tol: float,
    max_iters: int,
) -> CriticalPoint:
    s = hbar * start

    def state(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        moments = moment_set(polytope, s, order=3)
        return mu_gradient(moments, lam), mu_hessian(moments, lam)

    def merit(s: np.ndarray) -> float:
        try:
            gradient = mu_gradient(moment_set(polytope, s), lam)
        except ExponentOverflowError:
            return math.inf
        return 0.5 * float(gradient @ gradient)

    status = CriticalStatus.max_iters
    iterations = 0
    gradient, hessian = state(s)
    for iterations in range(max_iters + 1):
        gradient_norm = abs(hbar) * float(np.linalg.norm(gradient))
        logger.debug('newton %d: s=%s |grad|=%.3e', iterations, s, gradient_norm)
        if gradient_norm < tol:
            status = CriticalStatus.converged
            break
        if iterations == max_iters:
            break

        directions = []
        try:
            directions.append(np.linalg.solve(hessian, -gradient))
        except np.linalg.LinAlgError:
            logger.debug('singular Hessian at s=%s', s)
        directions.append(-hessian @ gradient)

        current = 0.5 * float(gradient @ gradient)
        slope_of = hessian @ gradient
        accepted = False
        for direction in directions:
            slope = float(slope_of @ direction)
            if not slope < 0:
                continue
            step = 1.0
            for _ in range(MAX_HALVINGS):
                candidate = s + step * direction
                if merit(candidate) <= current + ARMIJO * step * slope:
                    s = candidate
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                break
        if not accepted:
            eigenvalues = np.linalg.eigvalsh(hessian)
            if eigenvalues[0] < 0 < eigenvalues[-1]:
                status = CriticalStatus.indefinite_hessian
            break
        gradient, hessian = state(s)

    spectrum = np.linalg.eigvalsh(hbar**2 * hessian)
    return CriticalPoint(
        xi=(s / hbar).tolist(),
        lam=lam,
        hbar=hbar,
        gradient_norm=abs(hbar) * float(np.linalg.norm(gradient)),
        hessian_spectrum=sorted(spectrum.tolist()),
        newton_iters=iterations,
        status=status,
        start=start.tolist(),
    )


def _starts(dim: int, lam: float, hbar: float, xi0: np.ndarray) -> list[np.ndarray]:
    starts = [xi0]
    if lam > 0:
        radius = MULTISTART_RADIUS / abs(hbar)
        for j in range(dim):
            for sign in (1.0, -1.0):
                start = xi0.copy()
                start[j] += sign * radius
                starts.append(start)
    return starts


def find_critical_points(
    polytope: Polytope,
    lam: float,
    hbar: float,
    xi0: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> list[CriticalPoint]:
    """Newton from ``xi0`` and, for λ > 0, from the 2n axis points around it.

    Returns every run in start order, converged runs deduplicated.
    """
    if hbar == 0:
        raise ValidationError('hbar must be nonzero')
    xi0 = np.zeros(polytope.dim) if xi0 is None else np.asarray(xi0, dtype=float)
    if xi0.shape != (polytope.dim,):
        raise ValidationError(f'initial guess must have {polytope.dim} entries')
    starts = _starts(polytope.dim, lam, hbar, xi0)

    def run(start: np.ndarray) -> CriticalPoint:
        return _newton(polytope, lam, hbar, start, tol, max_iters)

    with ThreadPoolExecutor(max_workers=max(1, settings.threads)) as executor:
        results = list(executor.map(run, starts))

    distinct = []
    for point in results:
        if point.status is CriticalStatus.converged and any(
            other.status is CriticalStatus.converged
            and np.linalg.norm(np.subtract(point.xi, other.xi)) < DEDUP_DISTANCE
            for other in distinct
        ):
            continue
        distinct.append(point)
    return distinct


def find_critical(
    polytope: Polytope,
    lam: float,
    hbar: float,
    xi0: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> CriticalPoint:
    """The first converged critical point; the ``xi0`` start wins ties."""
    points = find_critical_points(polytope, lam, hbar, xi0, tol, max_iters)
    for point in points:
        if point.status is CriticalStatus.converged:
            return point
    best = min(points, key=lambda p: p.gradient_norm)
    raise MaxIterationsError(
        f'no critical point at lambda={lam}: best |grad| {best.gradient_norm:.3e} '
        f'({best.status.value})'
    )


def tian_zhu(polytope: Polytope, hbar: float) -> CriticalPoint:
    """Soliton vector: the minimiser of ``log int_P e^{-<x, s>} dμ``.

    At the minimum the weighted barycenter vanishes. Only ``s = hbar * xi``
    enters, so any nonzero ``hbar`` gives the same ``s`` and ``xi = s / hbar``.
    """
    if not polytope.is_reflexive:
        raise NotReflexiveError('soliton vector needs a reflexive polytope')
    if hbar == 0:
        raise ValidationError('hbar must be nonzero')

    def objective(s: np.ndarray) -> float:
        return math.log(moment_set(polytope, s).I0)

    def gradient(s: np.ndarray) -> np.ndarray:
        return -moment_set(polytope, s).barycenter

    def hessian(s: np.ndarray) -> np.ndarray:
        return moment_set(polytope, s).covariance

    result = minimize(
        objective,
        np.zeros(polytope.dim),
        jac=gradient,
        hess=hessian,
        method='trust-exact',
        options={'gtol': 1e-12},
    )
    s = np.asarray(result.x, dtype=float)
    barycenter = weighted_barycenter(polytope, s)
    if not np.linalg.norm(barycenter) < BARYCENTER_TOL:
        raise MaxIterationsError(
            f'weighted barycenter {barycenter.tolist()} did not vanish: '
            f'{result.message}'
        )
    params = Params(lam=TWO_PI, hbar=hbar, xi=tuple(s / hbar))
    return CriticalPoint(
        xi=(s / hbar).tolist(),
        lam=TWO_PI,
        hbar=hbar,
        gradient_norm=float(np.linalg.norm(grad_mu(polytope, params))),
        hessian_spectrum=sorted(np.linalg.eigvalsh(hessian_mu(polytope, params))),
        newton_iters=int(result.nit),
        status=CriticalStatus.converged,
    )


def extremal_vector(polytope: Polytope, hbar: float) -> np.ndarray:
    """``xi_ext = -2π / hbar * C^{-1} (beta - b m)`` from the moments at ξ = 0."""
    if hbar == 0:
        raise ValidationError('hbar must be nonzero')
    moments = moment_set(polytope, np.zeros(polytope.dim))
    rhs = -TWO_PI * (
        moments.boundary_barycenter - moments.boundary_ratio * moments.barycenter
    )
    try:
        sigma = np.linalg.solve(moments.covariance, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError('covariance of the polytope is singular') from exc
    return sigma / hbar


def default_configuration(dim: int) -> PLFunction:
    """``max(0, x_1 + ... + x_n)``."""
    return PLFunction.from_pieces([([0] * dim, 0), ([1] * dim, 0)])


def limit_check(
    polytope: Polytope,
    hbar: float,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    q: PLFunction | None = None,
) -> LimitDiagnostics:
    """Follow ``lambda * xi_lambda`` towards the extremal vector as λ decreases."""
    schedule = [float(lam) for lam in schedule]
    if not schedule or any(
        later >= earlier for earlier, later in zip(schedule, schedule[1:])
    ):
        raise ValidationError('lambda schedule must be strictly decreasing')
    if any(lam >= 0 for lam in schedule):
        raise ValidationError('lambda schedule must be negative')
    q = default_configuration(polytope.dim) if q is None else q
    xi_ext = extremal_vector(polytope, hbar)
    relative = relative_futaki(polytope, q, hbar, xi_ext)

    samples = []
    for lam in schedule:
        point = find_critical(polytope, lam, hbar, xi0=xi_ext / lam)
        xi = np.asarray(point.xi)
        params = Params(lam=lam, hbar=hbar, xi=tuple(point.xi))
        futaki = futaki_toric(polytope, q, params).value
        samples.append(
            LimitSample(
                lam=lam,
                xi=point.xi,
                lam_xi=(lam * xi).tolist(),
                deviation=float(np.linalg.norm(lam * xi - xi_ext)),
                futaki=futaki,
                gap=abs(futaki - relative),
            )
        )
        logger.info('lambda=%g deviation=%.3e', lam, samples[-1].deviation)
    return LimitDiagnostics(
        samples=samples,
        xi_ext=xi_ext.tolist(),
        deviations=[sample.deviation for sample in samples],
        gaps=[sample.gap for sample in samples],
        relative_futaki=relative,
        q=PLFunctionModel.from_pl(q),
    )
