import numpy as np

from mukstab.dependencies import get_params, get_pl_function, get_polytope, get_sampler
from mukstab.errors import ValidationError
from mukstab.models.geometry import PolytopeModel
from mukstab.models.job import JobSpec
from mukstab.models.params import Params
from mukstab.toric import equivint, futaki, volmin
from mukstab.toric.polytope import Polytope


def _moments_breakdown(polytope: Polytope, params: Params) -> dict:
    moments = equivint.moment_set(polytope, params.xi_eff)
    return {
        'I0': moments.I0,
        'I1': moments.I1.tolist(),
        'I2': moments.I2.tolist(),
        'B0': moments.B0,
        'B1': moments.B1.tolist(),
        'condition_estimate': moments.condition_estimate,
    }


def _header(job: JobSpec, polytope: Polytope) -> dict:
    return {
        'command': job.command.value,
        'polytope': PolytopeModel.from_polytope(polytope).model_dump(mode='json'),
    }


def intersect(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    params = get_params(job, polytope.dim)
    report = _header(job, polytope) | {
        'params': params.model_dump(mode='json'),
        'exp_intersection': equivint.exp_intersection(polytope, params),
        'L_exp_intersection': equivint.L_exp_intersection(polytope, params),
        'kappa_exp_intersection': equivint.kappa_exp_intersection(polytope, params),
        'power_intersections': [
            equivint.power_intersection(polytope, params, k)
            for k in range(equivint.MAX_POWER + 1)
        ],
        'mean_s': futaki.mean_s(polytope, params),
        'mu_character': futaki.mu_character(polytope, params),
    }
    if job.verbose:
        report['moments'] = _moments_breakdown(polytope, params)
    return report


def futaki_vector(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    params = get_params(job, polytope.dim)
    if len(job.zeta) != polytope.dim:
        raise ValidationError(f'zeta: expected {polytope.dim} entries')
    report = futaki.futaki_vector(polytope, params, job.zeta)
    result = _header(job, polytope) | report.model_dump(mode='json')
    result['mu_character'] = futaki.mu_character(polytope, params)
    if job.verbose:
        result['moments'] = _moments_breakdown(polytope, params)
    return result


def futaki_toric(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    params = get_params(job, polytope.dim)
    q = get_pl_function(job.q)
    report = futaki.futaki_toric(polytope, q, params)
    result = _header(job, polytope) | report.model_dump(mode='json')
    result['donaldson_futaki'] = futaki.donaldson_futaki(polytope, q)
    if polytope.is_reflexive and abs(params.lam - futaki.TWO_PI) < 1e-12:
        result['modified_futaki'] = futaki.modified_futaki(polytope, q, params)
    if job.verbose:
        result['moments'] = _moments_breakdown(polytope, params)
    return result


def minimize(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    if job.xi is not None and len(job.xi) != polytope.dim:
        raise ValidationError(f'xi: expected {polytope.dim} entries')
    points = volmin.find_critical_points(polytope, job.lam, job.hbar, xi0=job.xi)
    primary = volmin.find_critical(polytope, job.lam, job.hbar, xi0=job.xi)
    return _header(job, polytope) | {
        'primary': primary.model_dump(mode='json'),
        'critical_points': [p.model_dump(mode='json') for p in points],
    }


def tian_zhu(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    point = volmin.tian_zhu(polytope, job.hbar)
    barycenter = volmin.weighted_barycenter(polytope, job.hbar * np.asarray(point.xi))
    return _header(job, polytope) | {
        'soliton': point.model_dump(mode='json'),
        'weighted_barycenter': barycenter.tolist(),
    }


def extremal(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    xi_ext = volmin.extremal_vector(polytope, job.hbar)
    return _header(job, polytope) | {
        'hbar': job.hbar,
        'xi_ext': xi_ext.tolist(),
    }


def limit_check(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    q = None if job.q is None else get_pl_function(job.q)
    schedule = volmin.DEFAULT_SCHEDULE if job.schedule is None else job.schedule
    diagnostics = volmin.limit_check(polytope, job.hbar, schedule, q)
    return _header(job, polytope) | diagnostics.model_dump(mode='json')


def scan(job: JobSpec) -> dict:
    polytope = get_polytope(job.polytope)
    params = get_params(job, polytope.dim)
    sampler = get_sampler(job.sampler)
    report = futaki.semistability_scan(polytope, params, sampler)
    return _header(job, polytope) | {
        'sampler': sampler.model_dump(mode='json'),
        **report.model_dump(mode='json'),
    }
