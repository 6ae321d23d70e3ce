import math
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from domain.entities import IntegratorKind, RunConfig, SchemeCoefficients
from infrastructure.models import GridDocument, PdeDocument


def _finite(values: List[float]) -> List[float]:
    if not all(math.isfinite(v) for v in values):
        raise ValueError("Coefficients must be finite")
    return values


class SchemeRequest(BaseModel):
    alpha: List[float] = Field(..., min_length=1, description="alpha_0..alpha_{k-1}, alpha_k = 1 implied")
    beta: List[float] = Field(..., min_length=1, description="beta_0..beta_{k-1}, beta_k = 0 implied")

    @field_validator('alpha', 'beta')
    @classmethod
    def validate_finite(cls, v: List[float]) -> List[float]:
        return _finite(v)

    @model_validator(mode="after")
    def check_lengths(self) -> "SchemeRequest":
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must have the same length")
        return self

    def to_domain(self) -> SchemeCoefficients:
        return SchemeCoefficients(alpha=tuple(self.alpha), beta=tuple(self.beta))


class SchemeResponse(BaseModel):
    k: int
    alpha: List[float]
    beta: List[float]

    @classmethod
    def from_domain(cls, coeffs: SchemeCoefficients) -> "SchemeResponse":
        return cls(k=coeffs.k, alpha=list(coeffs.alpha), beta=list(coeffs.beta))


class InspectionResponse(BaseModel):
    k: int
    rho: List[float]
    sigma: List[float]
    consistent: bool
    truncation_order: int
    error_constant: Optional[float] = None
    hurwitz_polynomial: Optional[List[float]] = None
    hurwitz_stable: Optional[bool] = None
    routh_hurwitz: Optional[bool] = None
    root_condition_strict: Optional[bool] = None
    root_condition_lenient: Optional[bool] = None


class FromPqRequest(BaseModel):
    p: float
    q: float
    beta0: float
    beta1: float


class FromPqResponse(BaseModel):
    scheme: SchemeResponse
    consistent: bool
    root_condition: bool


class PhaseRequest(SchemeRequest):
    dx: float = Field(..., gt=0)
    dt: float = Field(..., gt=0)
    c: float = Field(..., gt=0)
    wavenumber: float = Field(4.0 * math.pi, gt=0)
    with_oracle: bool = False


class PhaseResult(BaseModel):
    amplitude: float
    displacement: float
    gamma: float


class PhaseResponse(PhaseResult):
    b2: float
    exact_displacement: float
    oracle: Optional[PhaseResult] = None


class PairedTTestRequest(BaseModel):
    xs: List[float] = Field(..., min_length=2)
    ys: List[float] = Field(..., min_length=2)

    @field_validator('xs', 'ys')
    @classmethod
    def validate_finite(cls, v: List[float]) -> List[float]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("Samples must be finite")
        return v


class PairedTTestResponse(BaseModel):
    t_statistic: Optional[float] = None
    p_value: float
    mean_x: float
    mean_y: float
    reductions: List[float]


class RunConfigRequest(BaseModel):
    pde: PdeDocument
    grid: GridDocument
    dt: float
    t_end: float
    integrator: IntegratorKind = IntegratorKind.ADAMS_BASHFORTH
    adams_order: int = 3

    def to_domain(self) -> RunConfig:
        return RunConfig(
            pde=self.pde.to_domain(),
            grid=self.grid.to_domain(),
            dt=self.dt,
            t_end=self.t_end,
            integrator=self.integrator,
            adams_order=self.adams_order,
        )


class ValidationResponse(BaseModel):
    valid: bool
    violations: List[str]


class ErrorResponse(BaseModel):
    detail: str
