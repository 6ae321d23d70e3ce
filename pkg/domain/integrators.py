"""Time integration: explicit multistep stepping, Adams-Bashforth, RK3(2) reference and drivers."""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from domain.coarsening import cell_average_coarsen
from domain.entities import FieldSeries, Grid1D, IntegratorKind, PdeSpec, RunConfig, SchemeCoefficients, validate
from domain.exceptions import DimensionMismatchError, IntegrationError, InvalidSchemeError
from domain.services import CoefficientProvider, FixedCoefficientProvider
from domain.spatial import RhsFunction, exact_solution, initial_state, make_rhs

logger = logging.getLogger(__name__)

SchemeSource = Union[SchemeCoefficients, CoefficientProvider]

# Bogacki-Shampine 3(2), propagating rows only
_BS32_TABLEAU = {
    0: [1 / 2],
    1: [0.0, 3 / 4],
    2: [2 / 9, 1 / 3, 4 / 9],
}
_BS32_NODES = (0.0, 1 / 2, 3 / 4)

_ADAMS_BASHFORTH = {
    3: (12.0, (5.0, -16.0, 23.0)),
    4: (24.0, (-9.0, 37.0, -59.0, 55.0)),
    5: (720.0, (251.0, -1274.0, 2616.0, -2774.0, 1901.0)),
}


@dataclass(frozen=True, eq=False)
class HistoryBuffer:
    """Last k states and right-hand sides, oldest first."""

    states: Tuple[np.ndarray, ...]
    rhs: Tuple[np.ndarray, ...]
    dt: float
    t_now: float

    def __post_init__(self):
        states = tuple(np.asarray(s, dtype=np.float64) for s in self.states)
        rhs = tuple(np.asarray(f, dtype=np.float64) for f in self.rhs)
        if len(states) != len(rhs) or not states:
            raise DimensionMismatchError(
                f"History needs matching non-empty state and RHS depths, got {len(states)} and {len(rhs)}"
            )
        shapes = {a.shape for a in states + rhs}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"History arrays disagree in shape: {sorted(shapes)}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "rhs", rhs)

    @property
    def depth(self) -> int:
        return len(self.states)

    def advanced(self, state: np.ndarray, rhs: np.ndarray) -> "HistoryBuffer":
        return HistoryBuffer(
            states=self.states[1:] + (state,),
            rhs=self.rhs[1:] + (rhs,),
            dt=self.dt,
            t_now=self.t_now + self.dt,
        )


def lmm_step(coeffs: SchemeCoefficients, history: HistoryBuffer) -> np.ndarray:
    if coeffs.k != history.depth:
        raise DimensionMismatchError(
            f"{coeffs.k}-step scheme applied to a history of depth {history.depth}"
        )
    nxt = np.zeros_like(history.states[0])
    for a, b, v, f in zip(coeffs.alpha, coeffs.beta, history.states, history.rhs):
        nxt -= a * v
        nxt += history.dt * b * f
    return nxt


def adams_bashforth(k: int) -> SchemeCoefficients:
    if k not in _ADAMS_BASHFORTH:
        raise InvalidSchemeError(f"Adams-Bashforth is tabulated for k in 3, 4, 5, got {k}")
    denominator, numerators = _ADAMS_BASHFORTH[k]
    return SchemeCoefficients(
        alpha=(0.0,) * (k - 1) + (-1.0,),
        beta=tuple(n / denominator for n in numerators),
    )


def _output_times(t0: float, t1: float, output_dt: float) -> np.ndarray:
    n_out = int(round((t1 - t0) / output_dt))
    times = t0 + output_dt * np.arange(n_out + 1)
    times[-1] = t1
    return times


def integrate_rk23(
    fun: RhsFunction,
    y0: np.ndarray,
    t0: float,
    t1: float,
    output_dt: float,
    rtol: float = 1e-6,
    atol: float = 1e-9
) -> np.ndarray:
    """Adaptive Bogacki-Shampine run sampled every ``output_dt``; rows are time levels."""
    y0 = np.asarray(y0, dtype=np.float64)
    times = _output_times(t0, t1, output_dt)
    if len(times) == 1:
        return y0[np.newaxis, :].copy()
    sol = solve_ivp(fun, (t0, t1), y0, method="RK23", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        failed_at = float(sol.t[-1]) if len(sol.t) else t0
        raise IntegrationError(f"RK23 failed: {sol.message}", time=failed_at)
    return sol.y.T.copy()


def rk23_fixed(
    fun: RhsFunction,
    y0: np.ndarray,
    t0: float,
    t1: float,
    dt: float
) -> np.ndarray:
    """Fixed-step third-order Bogacki-Shampine; rows are time levels."""
    times = _output_times(t0, t1, dt)
    levels = np.empty((len(times), np.size(y0)))
    y = np.asarray(y0, dtype=np.float64).copy()
    levels[0] = y
    for n in range(len(times) - 1):
        t = times[n]
        h = times[n + 1] - t
        stages = [fun(t, y)]
        for row, node in zip(_BS32_TABLEAU.values(), _BS32_NODES[1:]):
            slope = sum(w * s for w, s in zip(row, stages))
            stages.append(fun(t + node * h, y + h * slope))
        y = y + h * sum(w * s for w, s in zip(_BS32_TABLEAU[2], stages))
        if not np.all(np.isfinite(y)):
            raise IntegrationError("Fixed-step RK23 produced a non-finite state", time=times[n + 1], step=n + 1)
        levels[n + 1] = y
    return levels


def rk23_integrate(
    pde: PdeSpec,
    grid: Grid1D,
    v0: np.ndarray,
    t0: float,
    t1: float,
    output_dt: float,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    fixed: bool = False
) -> FieldSeries:
    rhs = make_rhs(pde, grid)
    if fixed:
        values = rk23_fixed(rhs, v0, t0, t1, output_dt)
    else:
        values = integrate_rk23(rhs, v0, t0, t1, output_dt, rtol=rtol, atol=atol)
    return FieldSeries(grid=grid, dt=output_dt, values=values, t0=t0)


def integrate_coarsened(
    pde: PdeSpec,
    fine_grid: Grid1D,
    v0: np.ndarray,
    t1: float,
    output_dt: float,
    factor: int,
    chunk_steps: int = 2000,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    keep_fine: bool = False
) -> Tuple[FieldSeries, Optional[FieldSeries]]:
    """Fine-grid RK run in windows of ``chunk_steps`` outputs, coarsened as it goes."""
    rhs = make_rhs(pde, fine_grid)
    n_steps = int(round(t1 / output_dt))
    coarse_levels = [cell_average_coarsen(v0, factor)[np.newaxis, :]]
    fine_levels = [np.asarray(v0, dtype=np.float64)[np.newaxis, :]] if keep_fine else None
    state = np.asarray(v0, dtype=np.float64)
    done = 0
    while done < n_steps:
        window = min(chunk_steps, n_steps - done)
        t_start = done * output_dt
        chunk = integrate_rk23(
            rhs, state, t_start, (done + window) * output_dt, output_dt, rtol=rtol, atol=atol
        )
        coarse_levels.append(cell_average_coarsen(chunk[1:], factor))
        if keep_fine:
            fine_levels.append(chunk[1:])
        state = chunk[-1]
        done += window
        logger.debug(f"Fine integration reached t={done * output_dt:.4g} of {t1}")

    coarse = FieldSeries(fine_grid.coarsened(factor), output_dt, np.concatenate(coarse_levels))
    fine = FieldSeries(fine_grid, output_dt, np.concatenate(fine_levels)) if keep_fine else None
    return coarse, fine


def exact_series(
    pde: PdeSpec,
    fine_grid: Grid1D,
    factor: int,
    dt: float,
    t_end: float
) -> FieldSeries:
    """Closed-form solution at fine cell centres, cell-averaged onto the coarse grid."""
    times = _output_times(0.0, t_end, dt)
    x = fine_grid.cell_centers
    fine = np.stack([exact_solution(pde, x, t) for t in times])
    return FieldSeries(fine_grid.coarsened(factor), dt, cell_average_coarsen(fine, factor))


def _resolve_provider(config: RunConfig, scheme_source: Optional[SchemeSource]) -> CoefficientProvider:
    if scheme_source is None:
        if config.integrator != IntegratorKind.ADAMS_BASHFORTH:
            raise InvalidSchemeError(f"Integrator {config.integrator.value} needs a scheme source")
        return FixedCoefficientProvider(adams_bashforth(config.adams_order))
    if isinstance(scheme_source, SchemeCoefficients):
        return FixedCoefficientProvider(scheme_source)
    return scheme_source


def run_simulation(
    config: RunConfig,
    scheme_source: Optional[SchemeSource] = None,
    initial: Optional[np.ndarray] = None,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    startup_tolerance_factor: float = 10.0
) -> FieldSeries:
    problems = validate(config)
    if problems:
        raise ValueError(f"Invalid run configuration: {'; '.join(problems)}")

    grid, dt = config.grid, config.dt
    v0 = initial_state(config.pde, grid) if initial is None else np.asarray(initial, dtype=np.float64)
    if v0.shape != (grid.n_cells,):
        raise DimensionMismatchError(f"Initial state has shape {v0.shape}, grid has {grid.n_cells} cells")

    if config.integrator == IntegratorKind.RK23_ADAPTIVE:
        return rk23_integrate(config.pde, grid, v0, 0.0, config.n_steps * dt, dt, rtol=rtol, atol=atol)
    if config.integrator == IntegratorKind.RK23_FIXED:
        return rk23_integrate(config.pde, grid, v0, 0.0, config.n_steps * dt, dt, fixed=True)

    provider = _resolve_provider(config, scheme_source)
    k = provider.k
    n_steps = config.n_steps
    if n_steps < k - 1:
        raise ValueError(f"{n_steps} steps is shorter than the {k - 1}-step startup")

    rhs_fn = make_rhs(config.pde, grid)
    levels = np.empty((n_steps + 1, grid.n_cells))
    levels[:k] = integrate_rk23(
        rhs_fn, v0, 0.0, (k - 1) * dt, dt,
        rtol=rtol / startup_tolerance_factor,
        atol=atol / startup_tolerance_factor,
    )
    history = HistoryBuffer(
        states=tuple(levels[:k]),
        rhs=tuple(rhs_fn(i * dt, levels[i]) for i in range(k)),
        dt=dt,
        t_now=(k - 1) * dt,
    )

    for n in range(k - 1, n_steps):
        coeffs = provider.coefficients(levels[n], n)
        nxt = lmm_step(coeffs, history)
        t_next = (n + 1) * dt
        if not np.all(np.isfinite(nxt)):
            raise IntegrationError(
                f"Non-finite state at step {n + 1} (t={t_next:.6g})", time=t_next, step=n + 1
            )
        levels[n + 1] = nxt
        history = history.advanced(nxt, rhs_fn(t_next, nxt))

    return FieldSeries(grid=grid, dt=dt, values=levels)


def integrate_scalar_lmm(
    coeffs: SchemeCoefficients,
    fun: Callable[[float, float], float],
    exact: Callable[[float], float],
    t_end: float,
    dt: float
) -> float:
    """Scalar ODE run started from exact history values; returns the value at ``t_end``."""
    k = coeffs.k
    n_steps = int(round(t_end / dt))
    states = [np.array([exact(i * dt)]) for i in range(k)]
    history = HistoryBuffer(
        states=tuple(states),
        rhs=tuple(np.array([fun(i * dt, s[0])]) for i, s in enumerate(states)),
        dt=dt,
        t_now=(k - 1) * dt,
    )
    for n in range(k - 1, n_steps):
        nxt = lmm_step(coeffs, history)
        t_next = (n + 1) * dt
        history = history.advanced(nxt, np.array([fun(t_next, nxt[0])]))
    return float(history.states[-1][0])
