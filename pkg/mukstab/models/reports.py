from enum import Enum

from pydantic import BaseModel, Field

from mukstab.models.geometry import PLFunctionModel
from mukstab.models.params import Params


class FutakiBreakdown(BaseModel):
    kappa_term: float
    lambda_sigma_term: float
    mean_s: float
    I0: float
    B0: float
    Iq: float
    Bq: float
    Iq1: float
    per_hbar: float | None = None


class FutakiReport(BaseModel):
    value: float
    breakdown: FutakiBreakdown
    params: Params
    vector: list[float] | None = None
    pl_function: PLFunctionModel | None = None


class CriticalStatus(str, Enum):
    converged = 'converged'
    max_iters = 'max_iters'
    indefinite_hessian = 'indefinite_hessian'


class CriticalPoint(BaseModel):
    xi: list[float]
    lam: float
    hbar: float
    gradient_norm: float
    hessian_spectrum: list[float]
    newton_iters: int
    status: CriticalStatus
    start: list[float] = Field(default_factory=list)


class LimitSample(BaseModel):
    lam: float
    xi: list[float]
    lam_xi: list[float]
    deviation: float
    futaki: float
    gap: float


class LimitDiagnostics(BaseModel):
    samples: list[LimitSample]
    xi_ext: list[float]
    deviations: list[float]
    gaps: list[float]
    relative_futaki: float
    q: PLFunctionModel


class ScanSample(BaseModel):
    index: int
    q: PLFunctionModel
    value: float


class ScanReport(BaseModel):
    params: Params
    samples: list[ScanSample]
    min_value: float
    argmin: PLFunctionModel


class CheckResult(BaseModel):
    name: str
    passed: bool
    error: float | None = None
    tolerance: float | None = None


class SuiteResult(BaseModel):
    name: str
    passed: bool
    checks: list[CheckResult]
