"""Domain layer - grids, schemes, PDE descriptions and field records."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np


class Boundary(str, Enum):
    PERIODIC = "periodic"


class PdeKind(str, Enum):
    HEAT = "heat"
    WAVE = "wave"
    BURGERS = "burgers"


class InitialCondition(str, Enum):
    SIN_2PI = "sin2pi"
    SIN_4PI = "sin4pi"
    ZERO = "zero"

    @property
    def wavenumber(self) -> float:
        return {
            InitialCondition.SIN_2PI: 2.0 * math.pi,
            InitialCondition.SIN_4PI: 4.0 * math.pi,
            InitialCondition.ZERO: 0.0,
        }[self]


class IntegratorKind(str, Enum):
    RK23_ADAPTIVE = "rk23_adaptive"
    RK23_FIXED = "rk23_fixed"
    ADAMS_BASHFORTH = "adams_bashforth"
    LEARNED = "learned"
    FIXED_COEFFICIENTS = "fixed_coefficients"

    @property
    def is_multistep(self) -> bool:
        return self not in (IntegratorKind.RK23_ADAPTIVE, IntegratorKind.RK23_FIXED)


_DEFAULT_INITIAL_CONDITION = {
    PdeKind.HEAT: InitialCondition.SIN_2PI,
    PdeKind.WAVE: InitialCondition.SIN_4PI,
    PdeKind.BURGERS: InitialCondition.ZERO,
}

FORCING_TERMS = 20
FORCING_AMPLITUDE = 0.5
FORCING_OMEGA = 0.4
FORCING_WAVENUMBERS = (3, 4, 5, 6)


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    domain_length: float
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if isinstance(self.n_cells, bool) or int(self.n_cells) != self.n_cells:
            raise ValueError("Cell count must be an integer")
        if self.n_cells <= 0:
            raise ValueError("Cell count must be positive")
        if not math.isfinite(self.domain_length) or self.domain_length <= 0:
            raise ValueError("Domain length must be a positive finite number")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        object.__setattr__(self, "domain_length", float(self.domain_length))

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_cells

    @property
    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def coarsened(self, factor: int) -> "Grid1D":
        return Grid1D(self.n_cells // factor, self.domain_length, self.boundary)

    def scaled(self, factor: int) -> "Grid1D":
        return Grid1D(self.n_cells * factor, self.domain_length * factor, self.boundary)

    def violations(self) -> List[str]:
        problems = []
        if self.n_cells < 3:
            problems.append(
                f"grid needs at least 3 cells for a three-point stencil, got {self.n_cells}"
            )
        if abs(self.dx * self.n_cells - self.domain_length) > 1e-12 * self.domain_length:
            problems.append("dx * n_cells does not reproduce the domain length")
        return problems


@dataclass(frozen=True)
class SchemeCoefficients:
    """Explicit k-step scheme with alpha_k = 1 and beta_k = 0 implied.

    Index i of ``alpha``/``beta`` multiplies the level n+i-k+1, so the last
    entry belongs to the newest state v^n.
    """

    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        if not alpha:
            raise ValueError("A scheme needs at least one step")
        if len(alpha) != len(beta):
            raise ValueError(
                f"alpha and beta lengths differ: {len(alpha)} != {len(beta)}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def as_vector(self) -> np.ndarray:
        return np.array(self.alpha + self.beta)

    def violations(self) -> List[str]:
        problems = []
        if not all(math.isfinite(v) for v in self.alpha + self.beta):
            problems.append("scheme coefficients must be finite")
        if self.alpha[0] ** 2 + self.beta[0] ** 2 == 0:
            problems.append("alpha_0 and beta_0 cannot both vanish")
        return problems


@dataclass(frozen=True)
class ForcingTerm:
    amplitude: float
    omega: float
    phi: float
    wavenumber: int

    def violations(self) -> List[str]:
        problems = []
        if abs(self.amplitude) > FORCING_AMPLITUDE:
            problems.append(f"forcing amplitude {self.amplitude} outside [-0.5, 0.5]")
        if abs(self.omega) > FORCING_OMEGA:
            problems.append(f"forcing frequency {self.omega} outside [-0.4, 0.4]")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            problems.append(f"forcing phase {self.phi} outside [0, 2pi]")
        if self.wavenumber not in FORCING_WAVENUMBERS:
            problems.append(f"forcing wavenumber {self.wavenumber} not in {FORCING_WAVENUMBERS}")
        return problems


@dataclass(frozen=True)
class ForcingSpec:
    terms: Tuple[ForcingTerm, ...]
    domain_length: float

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def violations(self) -> List[str]:
        problems = []
        if len(self.terms) != FORCING_TERMS:
            problems.append(f"forcing needs exactly {FORCING_TERMS} terms, got {len(self.terms)}")
        for term in self.terms:
            problems.extend(term.violations())
        return problems


@dataclass(frozen=True)
class PdeSpec:
    kind: PdeKind
    lam: Optional[float] = None
    c: Optional[float] = None
    eta: float = 0.01
    forcing: Optional[ForcingSpec] = None
    initial_condition: Optional[InitialCondition] = None

    def __post_init__(self):
        if self.initial_condition is None:
            object.__setattr__(
                self, "initial_condition", _DEFAULT_INITIAL_CONDITION[self.kind]
            )

    @property
    def parameter(self) -> Optional[float]:
        if self.kind == PdeKind.HEAT:
            return self.lam
        if self.kind == PdeKind.WAVE:
            return self.c
        return None

    def violations(self) -> List[str]:
        problems = []
        if self.kind == PdeKind.HEAT and not (self.lam is not None and self.lam > 0):
            problems.append(f"heat equation needs lambda > 0, got {self.lam}")
        if self.kind == PdeKind.WAVE and not (self.c is not None and self.c > 0):
            problems.append(f"wave equation needs c > 0, got {self.c}")
        if self.kind == PdeKind.BURGERS:
            if not self.eta > 0:
                problems.append(f"Burgers equation needs eta > 0, got {self.eta}")
            if self.forcing is not None:
                problems.extend(self.forcing.violations())
        elif self.forcing is not None:
            problems.append("forcing is only defined for the Burgers equation")
        return problems


@dataclass(frozen=True, eq=False)
class FieldSeries:
    grid: Grid1D
    dt: float
    values: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"Series values must be 2-D (time, cell), got {values.ndim}-D")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_levels(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_levels)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.n_levels - 1)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def violations(self) -> List[str]:
        problems = []
        if self.values.shape[1] != self.grid.n_cells:
            problems.append(
                f"series rows have {self.values.shape[1]} cells, grid has {self.grid.n_cells}"
            )
        if not np.all(np.isfinite(self.values)):
            problems.append("series contains non-finite values")
        if not self.dt > 0:
            problems.append(f"series time step must be positive, got {self.dt}")
        return problems


@dataclass(frozen=True)
class RunConfig:
    pde: PdeSpec
    grid: Grid1D
    dt: float
    t_end: float
    integrator: IntegratorKind
    adams_order: int = 3

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def violations(self) -> List[str]:
        problems = []
        if not self.dt > 0:
            problems.append(f"time step must be positive, got {self.dt}")
        if not self.t_end > 0:
            problems.append(f"final time must be positive, got {self.t_end}")
        if self.dt > 0 and self.t_end > 0:
            ratio = self.t_end / self.dt
            if abs(ratio - round(ratio)) > 0.5 * math.ulp(ratio):
                problems.append(
                    f"final time {self.t_end} is not a whole number of steps of {self.dt}"
                )
        if self.integrator == IntegratorKind.ADAMS_BASHFORTH and self.adams_order not in (3, 4, 5):
            problems.append(f"Adams-Bashforth order must be 3, 4 or 5, got {self.adams_order}")
        return problems


def validate(config: RunConfig) -> List[str]:
    return config.pde.violations() + config.grid.violations() + config.violations()
