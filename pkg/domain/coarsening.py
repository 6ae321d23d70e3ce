"""Cell-average coarsening and training-sample construction."""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from domain.entities import FieldSeries, Grid1D, PdeSpec
from domain.exceptions import CoarseningError, DimensionMismatchError, InsufficientDataError
from domain.spatial import make_rhs


def cell_average_coarsen(fine: np.ndarray, factor: int) -> np.ndarray:
    """Average consecutive blocks of ``factor`` cells along the last axis."""
    fine = np.asarray(fine, dtype=np.float64)
    if isinstance(factor, bool) or int(factor) != factor or factor < 1:
        raise CoarseningError(f"Coarsening factor must be a positive integer, got {factor}")
    factor = int(factor)
    n_cells = fine.shape[-1]
    if n_cells % factor:
        raise CoarseningError(f"Factor {factor} does not divide {n_cells} cells")
    return fine.reshape(fine.shape[:-1] + (n_cells // factor, factor)).mean(axis=-1)


def coarsen_series(series: FieldSeries, factor: int) -> FieldSeries:
    values = cell_average_coarsen(series.values, factor)
    return FieldSeries(
        grid=series.grid.coarsened(factor),
        dt=series.dt,
        values=values,
        t0=series.t0,
    )


@dataclass(frozen=True, eq=False)
class TrainingSample:
    history: Tuple[np.ndarray, np.ndarray, np.ndarray]
    target: np.ndarray
    rhs: Tuple[np.ndarray, np.ndarray, np.ndarray]
    pde: PdeSpec
    grid: Grid1D
    dt: float
    t_n: float

    def __post_init__(self):
        arrays = tuple(self.history) + tuple(self.rhs) + (self.target,)
        shapes = {np.shape(a) for a in arrays}
        if shapes != {(self.grid.n_cells,)}:
            raise DimensionMismatchError(
                f"Sample arrays must all have {self.grid.n_cells} cells, got {sorted(shapes)}"
            )
        if len(self.history) != len(self.rhs):
            raise DimensionMismatchError("History and RHS depths differ")
        object.__setattr__(self, "history", tuple(self.history))
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @property
    def input_state(self) -> np.ndarray:
        return self.history[-1]


def build_training_set(
    fine_series: FieldSeries,
    factor: int,
    pde: PdeSpec,
    depth: int = 3
) -> List[TrainingSample]:
    if fine_series.n_levels < depth + 1:
        raise InsufficientDataError(
            f"Need at least {depth + 1} time levels, series has {fine_series.n_levels}"
        )
    coarse = coarsen_series(fine_series, factor)
    rhs_fn = make_rhs(pde, coarse.grid)
    times = coarse.times
    levels = coarse.values
    # the loss only ever sees the coarse operator applied to coarse states
    rhs = [rhs_fn(t, v) for t, v in zip(times, levels)]

    samples = []
    for n in range(depth - 1, coarse.n_levels - 1):
        window = slice(n - depth + 1, n + 1)
        samples.append(TrainingSample(
            history=tuple(levels[window]),
            target=levels[n + 1],
            rhs=tuple(rhs[window]),
            pde=pde,
            grid=coarse.grid,
            dt=coarse.dt,
            t_n=float(times[n]),
        ))
    return samples
