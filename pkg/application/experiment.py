import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from domain.entities import InitialCondition, IntegratorKind, PdeKind, PdeSpec
from domain.learner import ConstraintMode


class PdeSection(BaseModel):
    kind: PdeKind
    train_value: Optional[float] = Field(None, gt=0)
    sweep: List[float] = Field(default_factory=list)
    eta: float = Field(0.01, gt=0)
    initial_condition: Optional[InitialCondition] = None

    @field_validator("sweep")
    @classmethod
    def validate_sweep(cls, v: List[float]) -> List[float]:
        if any(p <= 0 for p in v):
            raise ValueError("Sweep parameters must be positive")
        return v

    @model_validator(mode="after")
    def check_parameters(self) -> "PdeSection":
        if self.kind != PdeKind.BURGERS:
            if self.train_value is None:
                raise ValueError(f"{self.kind.value} experiments need a train_value")
            if not self.sweep:
                raise ValueError(f"{self.kind.value} experiments need a non-empty sweep")
        return self


class GridSection(BaseModel):
    fine_cells: int = Field(..., gt=0)
    domain_length: float = Field(..., gt=0)
    coarsen_factor: int = Field(..., ge=1)
    eval_domain_scale: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_factor(self) -> "GridSection":
        if self.fine_cells % self.coarsen_factor:
            raise ValueError(
                f"Coarsening factor {self.coarsen_factor} does not divide {self.fine_cells} cells"
            )
        return self

    @property
    def coarse_cells(self) -> int:
        return self.fine_cells // self.coarsen_factor


class TimeSection(BaseModel):
    dt: float = Field(..., gt=0)
    t_end: float = Field(..., gt=0)
    eval_t_end: Optional[float] = Field(None, gt=0)
    windows: List[float] = Field(default_factory=list)

    @property
    def test_t_end(self) -> float:
        return self.eval_t_end if self.eval_t_end is not None else self.t_end

    @model_validator(mode="after")
    def check_windows(self) -> "TimeSection":
        for w in self.windows:
            if not 0 < w <= self.test_t_end:
                raise ValueError(f"Error window {w} lies outside (0, {self.test_t_end}]")
        return self


class ForcingSection(BaseModel):
    train_seeds: List[int] = Field(default_factory=lambda: [0, 1, 2])
    test_samples: int = Field(20, ge=0)
    test_seed: int = 1000


class TrainingSection(BaseModel):
    modes: List[ConstraintMode] = Field(default_factory=lambda: list(ConstraintMode))
    n_steps: Optional[int] = Field(None, ge=0)
    learning_rate: Dict[ConstraintMode, float] = Field(default_factory=dict)
    gamma: Dict[ConstraintMode, float] = Field(default_factory=dict)
    weight_range: Dict[ConstraintMode, Tuple[float, float]] = Field(default_factory=dict)
    epsilon: float = Field(1e-8, gt=0)
    max_retries: int = Field(10, ge=1)
    constant_decimals: int = Field(6, ge=0)
    constant_modes: List[ConstraintMode] = Field(
        default_factory=lambda: [ConstraintMode.UNCONSTRAINED, ConstraintMode.SEMI_CONSTRAINED]
    )


class BaselineSection(BaseModel):
    rk: IntegratorKind = IntegratorKind.RK23_ADAPTIVE
    adams_orders: List[int] = Field(default_factory=lambda: [3, 4, 5])

    @field_validator("rk")
    @classmethod
    def validate_rk(cls, v: IntegratorKind) -> IntegratorKind:
        if v.is_multistep:
            raise ValueError(f"Baseline integrator must be a Runge-Kutta kind, got {v.value}")
        return v

    @field_validator("adams_orders")
    @classmethod
    def validate_orders(cls, v: List[int]) -> List[int]:
        bad = [k for k in v if k not in (3, 4, 5)]
        if bad:
            raise ValueError(f"Adams-Bashforth orders must be 3, 4 or 5, got {bad}")
        return v


class PhaseSection(BaseModel):
    wavenumber: Optional[float] = Field(None, gt=0)
    excluded: List[float] = Field(default_factory=list)


class StatisticsSection(BaseModel):
    baseline: str = Field("rk", min_length=1)


class ExperimentConfig(BaseModel):
    name: str
    pde: PdeSection
    grid: GridSection
    time: TimeSection
    forcing: ForcingSection = Field(default_factory=ForcingSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    baselines: BaselineSection = Field(default_factory=BaselineSection)
    phase: PhaseSection = Field(default_factory=PhaseSection)
    statistics: StatisticsSection = Field(default_factory=StatisticsSection)
    seed: int = 0
    store_fine: bool = False

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))

    def pde_spec(self, parameter: Optional[float] = None, forcing=None) -> PdeSpec:
        section = self.pde
        if section.kind == PdeKind.HEAT:
            return PdeSpec(PdeKind.HEAT, lam=parameter, initial_condition=section.initial_condition)
        if section.kind == PdeKind.WAVE:
            return PdeSpec(PdeKind.WAVE, c=parameter, initial_condition=section.initial_condition)
        return PdeSpec(
            PdeKind.BURGERS,
            eta=section.eta,
            forcing=forcing,
            initial_condition=section.initial_condition,
        )


@dataclass(frozen=True)
class RunMember:
    """One simulated configuration of an experiment."""

    tag: str
    role: str
    pde: PdeSpec
    parameter: Optional[float] = None

    @property
    def is_training(self) -> bool:
        return self.role == "train"


def member_tag(role: str, kind: PdeKind, index: int, parameter: Optional[float] = None) -> str:
    if parameter is not None:
        return f"{role}_{kind.value}_{parameter:g}"
    return f"{role}_{kind.value}_{index:03d}"
