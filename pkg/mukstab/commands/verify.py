"""Named groups of numerical checks run by ``mukstab verify``."""
import logging
import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from mukstab.errors import ValidationError
from mukstab.models.geometry import SamplerSpec
from mukstab.models.job import JobSpec
from mukstab.models.params import Params
from mukstab.models.reports import CheckResult, SuiteResult
from mukstab.toric import equivint, expint, futaki, volmin
from mukstab.toric.fixtures import FIXTURE_NAMES, fixture
from mukstab.toric.plfunction import PLFunction
from mukstab.toric.polytope import Polytope, triangulate

logger = logging.getLogger(__name__)

PI = math.pi
SEED = 0
ORACLE_SAMPLES = 100
SCAN_SAMPLES = 100
FD_STEPS = {1: 1e-4, 2: 1e-3, 3: 2e-3}


def _close(name: str, actual: float, expected: float, rel: float, abs_: float = 0.0):
    error = abs(float(actual) - float(expected))
    tolerance = max(abs_, rel * abs(float(expected)))
    return CheckResult(
        name=name, passed=error <= tolerance, error=error, tolerance=tolerance
    )


def _at_most(name: str, value: float, limit: float) -> CheckResult:
    value = float(value)
    return CheckResult(name=name, passed=value <= limit, error=value, tolerance=limit)


def _unit(dim: int) -> np.ndarray:
    direction = np.array([1.0, 0.5, 0.25, 0.125][:dim])
    return direction / np.linalg.norm(direction)


def _random_direction(rng: np.random.Generator, dim: int) -> np.ndarray:
    direction = rng.normal(size=dim)
    return direction / np.linalg.norm(direction)


def _step() -> PLFunction:
    return PLFunction.from_pieces([([0], 0), ([1], '-1/2')])


def anchors() -> list[CheckResult]:
    checks = []
    for name, expected_s, expected_kappa in (
        ('interval', 4 * PI, -2.0),
        ('square', 8 * PI, -4.0),
        ('simplex2', 12 * PI, -3.0),
    ):
        polytope = fixture(name)
        zero = Params.zero(polytope.dim)
        checks.append(
            _close(f'mean_s {name}', futaki.mean_s(polytope, zero), expected_s, 1e-12)
        )
        checks.append(
            _close(
                f'kappa {name}',
                equivint.kappa_exp_intersection(polytope, zero),
                expected_kappa,
                1e-12,
            )
        )
    interval = fixture('interval')
    checks.append(
        _close(
            'mu_character interval',
            futaki.mu_character(interval, Params.zero(1)),
            -4 * PI,
            1e-12,
        )
    )
    checks.append(
        _close(
            'mu_character interval lambda=1',
            futaki.mu_character(interval, Params.zero(1, lam=1.0)),
            -4 * PI + 1,
            1e-12,
        )
    )
    checks.append(
        _close(
            'futaki_toric step',
            futaki.futaki_toric(interval, _step(), Params.zero(1)).value,
            PI / 2,
            1e-12,
        )
    )
    checks.append(
        _close(
            'donaldson_futaki step',
            futaki.donaldson_futaki(interval, _step()),
            0.25,
            1e-12,
        )
    )
    checks.append(
        _close(
            'exp_intersection interval hbar=-2 xi=0.5',
            equivint.exp_intersection(interval, Params(hbar=-2.0, xi=(0.5,))),
            math.e - 1,
            1e-12,
        )
    )
    checks.append(_close('volume simplex2', fixture('simplex2').volume, 0.5, 0.0))
    checks.append(_close('vertices blp2', len(fixture('blp2').vertices), 4, 0.0))
    checks.append(_close('volume blp2', fixture('blp2').volume, 4, 0.0))
    checks.append(_close('boundary cube', fixture('cube').boundary_volume, 24, 0.0))
    return checks


def oracle() -> list[CheckResult]:
    rng = np.random.default_rng(SEED)
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        worst = 0.0
        for _ in range(ORACLE_SAMPLES):
            s = _random_direction(rng, polytope.dim) * rng.uniform(0.0, 10.0)
            exact = expint.polytope_exp(polytope, s)
            worst = max(worst, abs(expint.brion_exp(polytope, s) - exact) / exact)
        checks.append(_at_most(f'brion vs triangulation {name}', worst, 1e-9))
    checks.append(
        _close(
            'brion at zero interval',
            expint.brion_exp(fixture('interval'), [0.0]),
            1.0,
            0.0,
            1e-9,
        )
    )
    return checks


def _finite_difference(f: Callable[[float], float], k: int, h: float) -> float:
    if k == 1:
        return (f(h) - f(-h)) / (2 * h)
    if k == 2:
        return (f(h) - 2 * f(0.0) + f(-h)) / h**2
    return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h**3)


def moments() -> list[CheckResult]:
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        n = polytope.dim
        params = Params(hbar=1.0, xi=tuple(0.2 * _unit(n)))
        s = params.xi_eff

        def f(t: float) -> float:
            return expint.polytope_exp(polytope, t * s)  # noqa: B023

        for k, h in FD_STEPS.items():
            exact = (
                math.factorial(k)
                / math.factorial(n + k)
                * equivint.power_intersection(polytope, params, k)
            )
            checks.append(
                _close(
                    f'moment identity {name} k={k}',
                    _finite_difference(f, k, h),
                    exact,
                    0.0,
                    1e-6 * max(1.0, abs(exact)),
                )
            )
    return checks


def _fd_gradient(polytope: Polytope, params: Params, h: float) -> np.ndarray:
    xi = np.asarray(params.xi)
    gradient = np.empty(polytope.dim)
    for j in range(polytope.dim):
        step = np.zeros(polytope.dim)
        step[j] = h
        plus = futaki.mu_character(polytope, params.with_xi(xi + step))
        minus = futaki.mu_character(polytope, params.with_xi(xi - step))
        gradient[j] = (plus - minus) / (2 * h)
    return gradient


def gradient() -> list[CheckResult]:
    rng = np.random.default_rng(SEED + 1)
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        n = polytope.dim
        for lam in (0.0, 1.0, -3.0):
            xi = _random_direction(rng, n) * rng.uniform(0.0, 3.0)
            params = Params(lam=lam, hbar=1.0, xi=tuple(xi))
            analytic = volmin.grad_mu(polytope, params)
            error = np.max(np.abs(analytic - _fd_gradient(polytope, params, 1e-4)))
            checks.append(_at_most(f'grad_mu {name} lambda={lam}', error, 1e-6))

            small_xi = xi / max(1.0, float(np.linalg.norm(xi)))
            small = params.with_xi(small_xi)
            hessian = volmin.hessian_mu(polytope, small)
            fd = np.empty((n, n))
            for j in range(n):
                step = np.zeros(n)
                step[j] = 1e-3
                plus = volmin.grad_mu(polytope, small.with_xi(small_xi + step))
                minus = volmin.grad_mu(polytope, small.with_xi(small_xi - step))
                fd[:, j] = (plus - minus) / 2e-3
            checks.append(
                _at_most(
                    f'hessian_mu symmetric {name} lambda={lam}',
                    np.max(np.abs(hessian - hessian.T)),
                    1e-12,
                )
            )
            checks.append(
                _at_most(
                    f'hessian_mu vs differences {name} lambda={lam}',
                    np.max(np.abs(hessian - fd)),
                    1e-4,
                )
            )
    return checks


def futaki_suite() -> list[CheckResult]:
    rng = np.random.default_rng(SEED + 2)
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        n = polytope.dim
        params = Params(lam=1.5, hbar=1.0, xi=tuple(0.5 * _unit(n)))
        fd = _fd_gradient(polytope, params, 1e-4)
        for j in range(n):
            zeta = np.eye(n)[j]
            value = futaki.futaki_vector(polytope, params, zeta).value
            checks.append(
                _close(f'gradient law {name} e{j + 1}', value, -fd[j], 0.0, 1e-6)
            )

    worst = 0.0
    for i in range(50):
        polytope = fixture(FIXTURE_NAMES[i % len(FIXTURE_NAMES)])
        n = polytope.dim
        hbar = (1.0, -2.0, 3.7)[i % 3]
        params = Params(
            lam=rng.uniform(-5.0, 5.0),
            hbar=hbar,
            xi=tuple(_random_direction(rng, n) * rng.uniform(0.0, 1.0)),
        )
        a = rng.integers(-16, 17, size=n) / 8
        q = PLFunction.affine(a.tolist(), Fraction(int(rng.integers(-8, 9)), 8))
        toric = futaki.futaki_toric(polytope, q, params).value
        vector = futaki.futaki_vector(polytope, params, -a / hbar).value
        worst = max(worst, abs(toric - vector) / max(1.0, abs(vector)))
    checks.append(_at_most('affine consistency', worst, 1e-9))

    square = fixture('square')
    params = Params(lam=-1.0, hbar=1.0, xi=(0.3, -0.2))
    first = PLFunction.from_pieces([([0, 0], 0), ([1, 0], '-1/2')])
    second = PLFunction.from_pieces([([0, 0], 0), ([1, 1], -1)])
    total = futaki.futaki_toric(square, first + second, params).value
    parts = (
        futaki.futaki_toric(square, first, params).value
        + futaki.futaki_toric(square, second, params).value
    )
    checks.append(_close('linearity square', total, parts, 0.0, 1e-9))

    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        params = Params(lam=1.5, hbar=1.0, xi=tuple(0.5 * _unit(polytope.dim)))
        q = volmin.default_configuration(polytope.dim)
        v, w = futaki.mu_weights(params)
        checks.append(
            _close(
                f'weighted futaki {name}',
                futaki.weighted_futaki(polytope, q, v, w),
                futaki.futaki_toric(polytope, q, params).value,
                1e-9,
                1e-12,
            )
        )
    return checks


def invariance() -> list[CheckResult]:
    checks = []
    sampler = SamplerSpec(count=5, max_pieces=3, coeff_bound=2.0, seed=SEED)
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        n = polytope.dim
        params = Params(lam=2.0, hbar=-2.0, xi=tuple(0.3 * _unit(n)))
        worst = 0.0
        for q in futaki.sample_configurations(polytope, sampler):
            base = futaki.futaki_toric(polytope, q, params).value
            for shift in (-10, '7/2', 10):
                shifted = futaki.futaki_toric(polytope, q.shift(shift), params).value
                worst = max(worst, abs(shifted - base) / max(1.0, abs(base)))
        checks.append(_at_most(f'shift invariance {name}', worst, 1e-9))

        shift = np.array([0.5, -1.0, 0.25, 2.0][:n])
        s = 0.7 * _unit(n)
        moved = polytope.translate(shift.tolist())
        checks.append(
            _close(
                f'translation {name}',
                expint.polytope_exp(moved, s),
                math.exp(-float(shift @ s)) * expint.polytope_exp(polytope, s),
                1e-12,
            )
        )

        s = 0.7 * _unit(n)
        default = expint.polytope_exp(polytope, s)
        reverse = list(reversed(range(len(polytope.vertices))))
        other = expint.polytope_exp(polytope, s, order=reverse)
        checks.append(
            _close(f'triangulation independence {name}', other, default, 1e-12)
        )
        checks.append(
            _close(
                f'triangulations cover {name}',
                sum(simplex.volume for simplex in triangulate(polytope, reverse)),
                polytope.volume,
                0.0,
            )
        )
    return checks


def covariance() -> list[CheckResult]:
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        n = polytope.dim
        params = Params(lam=0.7, hbar=-2.0, xi=tuple(0.4 * _unit(n)))
        zeta = np.eye(n)[0]
        q = volmin.default_configuration(n)
        base_vector = futaki.futaki_vector(polytope, params, zeta).value
        base_toric = futaki.futaki_toric(polytope, q, params).value
        for hbar in (1.0, -2.0, 3.7):
            other = params.rescaled(hbar)
            ratio = params.hbar / hbar
            checks.append(
                _close(
                    f'hbar covariance vector {name} hbar={hbar}',
                    futaki.futaki_vector(polytope, other, ratio * zeta).value,
                    base_vector,
                    1e-12,
                    1e-13,
                )
            )
            checks.append(
                _close(
                    f'hbar covariance toric {name} hbar={hbar}',
                    futaki.futaki_toric(polytope, q, other).value,
                    base_toric,
                    1e-12,
                    1e-13,
                )
            )
            first, second = equivint.rescale_check(polytope, params, hbar)
            checks.append(_close(f'rescale {name} hbar={hbar}', second, first, 1e-13))
        for tau in (2, 1.5):
            scaled = polytope.dilate(tau)
            value = equivint.exp_intersection(
                scaled, params.with_xi(np.asarray(params.xi) / tau)
            )
            checks.append(
                _close(
                    f'scaling {name} tau={tau}',
                    value,
                    tau**n * equivint.exp_intersection(polytope, params),
                    1e-12,
                )
            )
    return checks


def cscK() -> list[CheckResult]:  # noqa: N802
    checks = []
    simplex = fixture('simplex2')
    for j in range(2):
        value = futaki.futaki_vector(simplex, Params.zero(2), np.eye(2)[j]).value
        checks.append(_close(f'futaki simplex2 e{j + 1}', value, 0.0, 0.0, 1e-10))
    for name in ('sym_interval', 'cube'):
        polytope = fixture(name)
        for lam in (-3.0, 0.0, 4.0):
            params = Params.zero(polytope.dim, lam=lam)
            value = futaki.futaki_vector(polytope, params, np.ones(polytope.dim)).value
            checks.append(
                _close(f'futaki {name} lambda={lam}', value, 0.0, 0.0, 1e-10)
            )
    report = futaki.semistability_scan(
        fixture('interval'),
        Params.zero(1),
        SamplerSpec(count=SCAN_SAMPLES, seed=SEED),
    )
    checks.append(
        CheckResult(
            name='scan interval',
            passed=report.min_value >= -1e-10,
            error=report.min_value,
            tolerance=-1e-10,
        )
    )
    return checks


def soliton() -> list[CheckResult]:
    polytope = fixture('blp2')
    hbar = 1.0
    checks = []
    point = volmin.tian_zhu(polytope, hbar)
    critical = volmin.find_critical(polytope, futaki.TWO_PI, hbar)
    xi_star = np.asarray(point.xi)
    checks.append(
        _at_most(
            'tian_zhu vs find_critical',
            np.linalg.norm(xi_star - np.asarray(critical.xi)),
            1e-7,
        )
    )

    def diagonal(a: float) -> float:
        return float(np.sum(volmin.weighted_barycenter(polytope, [a, a])))

    root = brentq(diagonal, 0.0, 5.0, xtol=1e-14)
    checks.append(_close('diagonal oracle', xi_star[0] * hbar, root, 0.0, 1e-7))
    checks.append(_close('diagonal symmetry', xi_star[0], xi_star[1], 0.0, 1e-9))
    checks.append(
        _at_most(
            'weighted barycenter',
            np.linalg.norm(volmin.weighted_barycenter(polytope, hbar * xi_star)),
            1e-8,
        )
    )
    params = Params(lam=futaki.TWO_PI, hbar=hbar, xi=tuple(xi_star))
    for j in range(2):
        q = PLFunction.affine(np.eye(2)[j].tolist(), 0)
        value = futaki.modified_futaki(polytope, q, params)
        checks.append(_close(f'modified futaki x{j + 1}', value, 0.0, 0.0, 1e-8))

    sampler = SamplerSpec(count=SCAN_SAMPLES, seed=SEED)
    at_soliton = futaki.semistability_scan(polytope, params, sampler)
    checks.append(
        CheckResult(
            name='scan at soliton',
            passed=at_soliton.min_value >= -1e-8,
            error=at_soliton.min_value,
            tolerance=-1e-8,
        )
    )
    at_zero = futaki.semistability_scan(
        polytope, Params.zero(2, lam=futaki.TWO_PI, hbar=hbar), sampler
    )
    checks.append(
        CheckResult(
            name='scan at zero destabilised',
            passed=at_zero.min_value < 0,
            error=at_zero.min_value,
            tolerance=0.0,
        )
    )
    return checks


def extremal() -> list[CheckResult]:
    checks = []
    symmetric = (('sym_interval', 1e-12), ('cube', 1e-12), ('simplex2', 1e-10))
    for name, tolerance in symmetric:
        xi_ext = volmin.extremal_vector(fixture(name), 1.0)
        checks.append(_at_most(f'extremal {name}', np.linalg.norm(xi_ext), tolerance))

    polytope = fixture('blp2')
    xi_ext = volmin.extremal_vector(polytope, 1.0)
    expected = -12 * PI / 11
    for j in range(2):
        checks.append(_close(f'extremal blp2 x{j + 1}', xi_ext[j], expected, 1e-10))
    for j in range(2):
        q = PLFunction.affine(np.eye(2)[j].tolist(), 0)
        value = futaki.relative_futaki(polytope, q, 1.0, xi_ext)
        checks.append(_close(f'relative futaki x{j + 1}', value, 0.0, 0.0, 1e-9))

    diagnostics = volmin.limit_check(polytope, 1.0)
    deviations = diagnostics.deviations
    bound = 1e-2 * (1 + float(np.linalg.norm(xi_ext)))
    checks.append(_at_most('limit deviation', deviations[-1], bound))
    monotone = all(
        later <= earlier * (1.1 if i == 0 else 1.0) + 1e-12
        for i, (earlier, later) in enumerate(zip(deviations, deviations[1:]))
    )
    checks.append(CheckResult(name='limit deviations nonincreasing', passed=monotone))
    gaps = diagnostics.gaps
    decreasing = all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    checks.append(CheckResult(name='limit gaps decreasing', passed=decreasing))
    return checks


def series() -> list[CheckResult]:
    checks = []
    for name in FIXTURE_NAMES:
        polytope = fixture(name)
        params = Params(hbar=1.0, xi=tuple(5.0 * _unit(polytope.dim)))
        expansion = equivint.series_partial_sums(polytope, params, 60)
        checks.append(
            _close(
                f'series {name}', expansion.partial_sums[-1], expansion.value, 1e-10
            )
        )
        checks.append(
            _at_most(
                f'series tail {name}', expansion.tail_bound, 1e-10 * expansion.value
            )
        )
    return checks


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    'anchors': anchors,
    'oracle': oracle,
    'moments': moments,
    'gradient': gradient,
    'futaki': futaki_suite,
    'invariance': invariance,
    'covariance': covariance,
    'cscK': cscK,
    'soliton': soliton,
    'extremal': extremal,
    'series': series,
}


def run_suite(name: str) -> SuiteResult:
    checks = SUITES[name]()
    failed = [check.name for check in checks if not check.passed]
    if failed:
        logger.warning('suite %s: %d checks failed: %s', name, len(failed), failed)
    return SuiteResult(name=name, passed=not failed, checks=checks)


def verify(job: JobSpec) -> dict:
    if job.suite == 'all':
        names = list(SUITES)
    elif job.suite in SUITES:
        names = [job.suite]
    else:
        raise ValidationError(
            f'suite: unknown suite {job.suite!r}, expected all or {", ".join(SUITES)}'
        )
    results = [run_suite(name) for name in names]
    return {
        'command': job.command.value,
        'passed': all(result.passed for result in results),
        'suites': [result.model_dump(mode='json') for result in results],
    }
