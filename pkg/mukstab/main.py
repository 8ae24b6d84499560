import argparse
import json
import logging
import sys

import pydantic
import sentry_sdk

from mukstab import __version__
from mukstab.commands import compute, verify
from mukstab.dependencies import set_sentry_job
from mukstab.errors import ComputeError, InputError, MukstabError
from mukstab.models.job import Command, JobSpec, OutputFormat
from mukstab.models.utils import flatten, sanitize
from mukstab.settings import settings

logger = logging.getLogger('mukstab')

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3

HANDLERS = {
    Command.intersect: compute.intersect,
    Command.futaki_vector: compute.futaki_vector,
    Command.futaki_toric: compute.futaki_toric,
    Command.minimize: compute.minimize,
    Command.tian_zhu: compute.tian_zhu,
    Command.extremal: compute.extremal,
    Command.limit_check: compute.limit_check,
    Command.scan: compute.scan,
    Command.verify: verify.verify,
}


def before_send(event, hint):
    if 'exc_info' in hint:
        exc_type, exc_value, tb = hint['exc_info']
        if isinstance(exc_value, InputError):
            return None
    return event


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mukstab',
        description='Equivariant intersection numbers and μ-Futaki invariants '
        'of polarized toric varieties.',
    )
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('command', choices=[c.value for c in Command])
    parser.add_argument('--polytope', help='fixture name, JSON file or inline JSON')
    parser.add_argument('--q', help='PL function as JSON file or inline JSON')
    parser.add_argument('--sampler', help='scan sampler as JSON file or inline JSON')
    parser.add_argument('--zeta', type=float, nargs='+')
    parser.add_argument('--lambda', dest='lam', type=float, default=0.0)
    parser.add_argument('--hbar', type=float, default=settings.default_hbar)
    parser.add_argument('--xi', type=float, nargs='+')
    parser.add_argument('--schedule', type=float, nargs='+')
    parser.add_argument('--suite', default='all')
    parser.add_argument('--output', help='write the report here instead of stdout')
    parser.add_argument(
        '--format', choices=[f.value for f in OutputFormat], default='json'
    )
    parser.add_argument('--verbose', action='store_true')
    return parser


def parse_job(argv: list[str] | None = None) -> JobSpec:
    args = build_parser().parse_args(argv)
    return JobSpec.model_validate(vars(args))


def run(job: JobSpec) -> tuple[int, dict]:
    """Dispatch ``job``; failures come back as an exit code and an error report."""
    set_sentry_job(job)
    try:
        report = HANDLERS[job.command](job)
    except InputError as exc:
        logger.debug('input error', exc_info=True)
        return EXIT_INPUT, _error_report(job, exc)
    except ComputeError as exc:
        logger.warning('%s failed: %s', job.command.value, exc)
        sentry_sdk.capture_exception(exc)
        return EXIT_COMPUTE, _error_report(job, exc)
    except Exception as exc:
        logger.exception('%s failed', job.command.value)
        sentry_sdk.capture_exception(exc)
        error = ComputeError(f'{job.command.value}: {type(exc).__name__}: {exc}')
        return EXIT_COMPUTE, _error_report(job, error)
    if job.command is Command.verify and not report['passed']:
        return EXIT_COMPUTE, report
    return EXIT_OK, report


def _error_report(job: JobSpec, exc: MukstabError) -> dict:
    return {
        'command': job.command.value,
        'error': {'type': type(exc).__name__, 'message': str(exc)},
    }


def render(report: dict, output_format: OutputFormat) -> str:
    report = sanitize(report)
    if output_format is OutputFormat.table:
        rows = flatten(report)
        width = max(len(key) for key, _ in rows)
        return '\n'.join(f'{key:<{width}}  {json.dumps(value)}' for key, value in rows)
    return json.dumps(report, indent=2, sort_keys=True)


def main(argv: list[str] | None = None) -> int:
    try:
        job = parse_job(argv)
    except pydantic.ValidationError as exc:
        for error in exc.errors():
            location = '.'.join(str(part) for part in error['loc']) or 'arguments'
            print(f'mukstab: {location}: {error["msg"]}', file=sys.stderr)
        return EXIT_INPUT

    logging.basicConfig(
        format='[%(name)s] %(message)s',
        level=logging.DEBUG if job.verbose else settings.log_level,
    )
    sentry_sdk.init(dsn=settings.sentry_dsn, before_send=before_send)

    code, report = run(job)
    text = render(report, job.format)
    if job.output is not None:
        job.output.write_text(text + '\n')
    else:
        print(text)
    if 'error' in report:
        print(f'mukstab: {report["error"]["message"]}', file=sys.stderr)
    return code


if __name__ == '__main__':
    sys.exit(main())
