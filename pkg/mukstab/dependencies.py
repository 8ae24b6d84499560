import json
from pathlib import Path

import pydantic
from sentry_sdk import set_tag

from mukstab.errors import ParseError, ValidationError
from mukstab.models.geometry import PLFunctionModel, PolytopeModel, SamplerSpec
from mukstab.models.job import JobSpec
from mukstab.models.params import Params
from mukstab.toric.fixtures import FIXTURE_NAMES, fixture
from mukstab.toric.plfunction import PLFunction
from mukstab.toric.polytope import Polytope


def load_json_source(source: str, field: str) -> dict:
    """Inline JSON (starting with ``{``) or a path to a JSON file."""
    text = source.strip()
    if not text.startswith('{'):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f'{field}: cannot read {source}: {exc.strerror}') from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f'{field}: invalid JSON ({exc.msg} at line {exc.lineno})'
        ) from exc
    if not isinstance(data, dict):
        raise ParseError(f'{field}: expected a JSON object')
    return data


def _validate(model: type[pydantic.BaseModel], data: dict, field: str):
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        location = '.'.join(str(part) for part in first['loc'])
        raise ValidationError(f'{field}.{location}: {first["msg"]}') from exc


def get_polytope(source: str) -> Polytope:
    if source in FIXTURE_NAMES:
        return fixture(source)
    data = load_json_source(source, 'polytope')
    return _validate(PolytopeModel, data, 'polytope').to_polytope()


def get_pl_function(source: str) -> PLFunction:
    data = load_json_source(source, 'q')
    return _validate(PLFunctionModel, data, 'q').to_pl()


def get_sampler(source: str | None) -> SamplerSpec:
    if source is None:
        return SamplerSpec()
    return _validate(SamplerSpec, load_json_source(source, 'sampler'), 'sampler')


def get_params(job: JobSpec, dim: int) -> Params:
    xi = [0.0] * dim if job.xi is None else job.xi
    if len(xi) != dim:
        raise ValidationError(f'xi: expected {dim} entries, got {len(xi)}')
    return _validate(
        Params, {'lam': job.lam, 'hbar': job.hbar, 'xi': xi}, 'params'
    )


def set_sentry_job(job: JobSpec) -> None:
    set_tag('command', job.command.value)
