import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from mukstab.settings import settings


def _check_finite(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError('must be finite')
    return value


def _check_vector(values: tuple[float, ...]) -> tuple[float, ...]:
    if not all(math.isfinite(v) for v in values):
        raise ValueError('entries must be finite')
    return values


class Params(BaseModel):
    """The triple (lambda, hbar, xi); only ``hbar * xi`` enters an integral."""

    model_config = ConfigDict(frozen=True)

    lam: float = 0.0
    hbar: float = Field(default_factory=lambda: settings.default_hbar)
    xi: tuple[float, ...]

    check_lam = field_validator('lam')(_check_finite)
    check_xi = field_validator('xi')(_check_vector)

    @field_validator('hbar')
    @classmethod
    def check_hbar(cls, value: float) -> float:
        _check_finite(value)
        if value == 0:
            raise ValueError('hbar must be nonzero')
        return value

    @property
    def dim(self) -> int:
        return len(self.xi)

    @property
    def xi_eff(self) -> np.ndarray:
        return self.hbar * np.asarray(self.xi, dtype=float)

    def with_xi(self, xi) -> 'Params':
        return self.model_copy(update={'xi': tuple(float(x) for x in xi)})

    def rescaled(self, hbar: float) -> 'Params':
        """The same effective covector written with another ``hbar``."""
        if hbar == 0:
            raise ValueError('hbar must be nonzero')
        xi = tuple(self.hbar / hbar * x for x in self.xi)
        return self.model_copy(update={'hbar': float(hbar), 'xi': xi})

    @classmethod
    def zero(cls, dim: int, lam: float = 0.0, hbar: float | None = None) -> 'Params':
        hbar = settings.default_hbar if hbar is None else hbar
        return cls(lam=lam, hbar=hbar, xi=(0.0,) * dim)
