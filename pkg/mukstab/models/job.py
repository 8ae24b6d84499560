from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, field_validator, model_validator

from mukstab.settings import settings


class Command(str, Enum):
    intersect = 'intersect'
    futaki_vector = 'futaki-vector'
    futaki_toric = 'futaki-toric'
    minimize = 'minimize'
    tian_zhu = 'tian-zhu'
    extremal = 'extremal'
    limit_check = 'limit-check'
    scan = 'scan'
    verify = 'verify'


class OutputFormat(str, Enum):
    json = 'json'
    table = 'table'


class JobSpec(BaseModel):
    """One CLI invocation. Inputs are fixture names, file paths or inline JSON."""

    command: Command
    polytope: str | None = None
    q: str | None = None
    sampler: str | None = None
    zeta: list[float] | None = None
    lam: float = 0.0
    hbar: float = Field(default_factory=lambda: settings.default_hbar)
    xi: list[float] | None = None
    schedule: list[float] | None = None
    suite: str = 'all'
    output: Path | None = None
    format: OutputFormat = OutputFormat.json
    verbose: bool = False

    @field_validator('hbar')
    @classmethod
    def check_hbar(cls, value: float) -> float:
        if value == 0:
            raise ValueError('hbar must be nonzero')
        return value

    @model_validator(mode='after')
    def check_required_inputs(self) -> 'JobSpec':
        if self.command is not Command.verify and self.polytope is None:
            raise ValueError(f'{self.command.value} needs --polytope')
        if self.command is Command.futaki_toric and self.q is None:
            raise ValueError('futaki-toric needs --q')
        if self.command is Command.futaki_vector and self.zeta is None:
            raise ValueError('futaki-vector needs --zeta')
        return self
