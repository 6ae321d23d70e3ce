"""JSON documents stored in a run directory."""
from typing import Dict, List, Literal, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from application.experiment import RunMember
from domain.coarsening import TrainingSample
from domain.entities import (
    Boundary,
    FieldSeries,
    ForcingSpec,
    ForcingTerm,
    Grid1D,
    InitialCondition,
    PdeKind,
    PdeSpec,
    SchemeCoefficients,
)
from domain.learner import ConstraintMode, MlpParams


class GridDocument(BaseModel):
    n_cells: int
    domain_length: float
    boundary: Boundary = Boundary.PERIODIC

    @classmethod
    def from_domain(cls, grid: Grid1D) -> "GridDocument":
        return cls(n_cells=grid.n_cells, domain_length=grid.domain_length, boundary=grid.boundary)

    def to_domain(self) -> Grid1D:
        return Grid1D(self.n_cells, self.domain_length, self.boundary)


class ForcingTermDocument(BaseModel):
    amplitude: float
    omega: float
    phi: float
    wavenumber: int


class ForcingDocument(BaseModel):
    domain_length: float
    terms: List[ForcingTermDocument]

    @classmethod
    def from_domain(cls, spec: ForcingSpec) -> "ForcingDocument":
        return cls(
            domain_length=spec.domain_length,
            terms=[ForcingTermDocument(**vars(t)) for t in spec.terms],
        )

    def to_domain(self) -> ForcingSpec:
        return ForcingSpec(
            terms=tuple(ForcingTerm(**t.model_dump()) for t in self.terms),
            domain_length=self.domain_length,
        )


class PdeDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: PdeKind
    lam: Optional[float] = Field(None, alias="lambda")
    c: Optional[float] = None
    eta: float = 0.01
    initial_condition: Optional[InitialCondition] = None
    forcing: Optional[ForcingDocument] = None

    @classmethod
    def from_domain(cls, pde: PdeSpec) -> "PdeDocument":
        return cls(
            kind=pde.kind,
            lam=pde.lam,
            c=pde.c,
            eta=pde.eta,
            initial_condition=pde.initial_condition,
            forcing=ForcingDocument.from_domain(pde.forcing) if pde.forcing is not None else None,
        )

    def to_domain(self) -> PdeSpec:
        return PdeSpec(
            kind=self.kind,
            lam=self.lam,
            c=self.c,
            eta=self.eta,
            forcing=self.forcing.to_domain() if self.forcing is not None else None,
            initial_condition=self.initial_condition,
        )


class SeriesDocument(BaseModel):
    type: Literal["field_series"] = "field_series"
    grid: GridDocument
    dt: float
    t0: float = 0.0
    values: List[List[float]]

    @classmethod
    def from_domain(cls, series: FieldSeries) -> "SeriesDocument":
        return cls(
            grid=GridDocument.from_domain(series.grid),
            dt=series.dt,
            t0=series.t0,
            values=series.values.tolist(),
        )

    def to_domain(self) -> FieldSeries:
        return FieldSeries(self.grid.to_domain(), self.dt, np.array(self.values), self.t0)


class TrainingHeaderDocument(BaseModel):
    type: Literal["training_set"] = "training_set"
    pde: PdeDocument
    grid: GridDocument
    dt: float
    n_samples: int


class TrainingSampleDocument(BaseModel):
    type: Literal["training_sample"] = "training_sample"
    t_n: float
    history: List[List[float]]
    rhs: List[List[float]]
    target: List[float]

    @classmethod
    def from_domain(cls, sample: TrainingSample) -> "TrainingSampleDocument":
        return cls(
            t_n=sample.t_n,
            history=[h.tolist() for h in sample.history],
            rhs=[f.tolist() for f in sample.rhs],
            target=sample.target.tolist(),
        )

    def to_domain(self, pde: PdeSpec, grid: Grid1D, dt: float) -> TrainingSample:
        return TrainingSample(
            history=tuple(np.array(h) for h in self.history),
            target=np.array(self.target),
            rhs=tuple(np.array(f) for f in self.rhs),
            pde=pde,
            grid=grid,
            dt=dt,
            t_n=self.t_n,
        )


class CheckpointDocument(BaseModel):
    """Network parameters; weight matrices are flattened row-major."""

    type: Literal["checkpoint"] = "checkpoint"
    mode: ConstraintMode
    n_input: int
    n_hidden: int
    n_outputs: int
    w1: List[float]
    b1: List[float]
    w2: List[float]
    b2: List[float]
    attempts: int = 1
    seed: int = 0

    @classmethod
    def from_domain(cls, params: MlpParams, attempts: int = 1, seed: int = 0) -> "CheckpointDocument":
        return cls(
            mode=params.mode,
            n_input=params.n_input,
            n_hidden=params.b1.shape[0],
            n_outputs=params.mode.n_outputs,
            w1=params.w1.ravel().tolist(),
            b1=params.b1.tolist(),
            w2=params.w2.ravel().tolist(),
            b2=params.b2.tolist(),
            attempts=attempts,
            seed=seed,
        )

    def to_domain(self) -> MlpParams:
        return MlpParams(
            w1=np.array(self.w1).reshape(self.n_input, self.n_hidden),
            b1=np.array(self.b1),
            w2=np.array(self.w2).reshape(self.n_hidden, self.n_outputs),
            b2=np.array(self.b2),
            mode=self.mode,
        )


class SchemeDocument(BaseModel):
    alpha: List[float]
    beta: List[float]


class ConstantsDocument(BaseModel):
    """Constant schemes extracted at training time, keyed by mode."""

    type: Literal["constants"] = "constants"
    schemes: Dict[str, SchemeDocument] = Field(default_factory=dict)

    @classmethod
    def from_domain(cls, constants: Mapping[str, SchemeCoefficients]) -> "ConstantsDocument":
        return cls(schemes={
            mode: SchemeDocument(alpha=list(c.alpha), beta=list(c.beta)) for mode, c in constants.items()
        })

    def to_domain(self) -> Dict[str, SchemeCoefficients]:
        return {
            mode: SchemeCoefficients(alpha=tuple(s.alpha), beta=tuple(s.beta)) for mode, s in self.schemes.items()
        }


class MemberDocument(BaseModel):
    tag: str
    role: str
    parameter: Optional[float] = None
    pde: PdeDocument

    @classmethod
    def from_domain(cls, member: RunMember) -> "MemberDocument":
        return cls(
            tag=member.tag,
            role=member.role,
            parameter=member.parameter,
            pde=PdeDocument.from_domain(member.pde),
        )

    def to_domain(self) -> RunMember:
        return RunMember(tag=self.tag, role=self.role, pde=self.pde.to_domain(), parameter=self.parameter)


class ManifestDocument(BaseModel):
    type: Literal["manifest"] = "manifest"
    experiment: str
    members: List[MemberDocument]
