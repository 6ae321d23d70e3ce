"""Periodic finite-volume right-hand sides for the heat, wave and Burgers equations."""
import math
from typing import Callable, Optional, Union

import numpy as np
import numpy.typing as npt

from domain.entities import (
    FORCING_AMPLITUDE,
    FORCING_OMEGA,
    FORCING_TERMS,
    FORCING_WAVENUMBERS,
    ForcingSpec,
    ForcingTerm,
    Grid1D,
    PdeKind,
    PdeSpec,
)
from domain.exceptions import DimensionMismatchError, UnsupportedPdeError

# time derivative per cell
RhsField = npt.NDArray[np.float64]
RhsFunction = Callable[[float, np.ndarray], np.ndarray]


def _check_state(state: np.ndarray, grid: Grid1D) -> np.ndarray:
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (grid.n_cells,):
        raise DimensionMismatchError(
            f"State has shape {state.shape}, grid expects ({grid.n_cells},)"
        )
    return state


def heat_rhs(state: np.ndarray, lam: float, grid: Grid1D) -> RhsField:
    v = _check_state(state, grid)
    # face flux lambda * (v_{j+1} - v_j) / dx, differenced across the cell
    flux = lam * (np.roll(v, -1) - v) / grid.dx
    return (flux - np.roll(flux, 1)) / grid.dx


def wave_rhs(state: np.ndarray, c: float, grid: Grid1D) -> RhsField:
    v = _check_state(state, grid)
    return -c * (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * grid.dx)


def forcing_eval(
    spec: ForcingSpec,
    x: Union[float, np.ndarray],
    t: float
) -> Union[float, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    total = np.zeros_like(x)
    for term in spec.terms:
        if term.amplitude == 0.0:
            continue
        total += term.amplitude * np.sin(
            term.omega * t + 2.0 * math.pi * term.wavenumber * x / spec.domain_length + term.phi
        )
    return float(total) if total.ndim == 0 else total


def sample_forcing(
    rng: np.random.Generator,
    domain_length: float,
    n_terms: int = FORCING_TERMS
) -> ForcingSpec:
    amplitude = rng.uniform(-FORCING_AMPLITUDE, FORCING_AMPLITUDE, n_terms)
    omega = rng.uniform(-FORCING_OMEGA, FORCING_OMEGA, n_terms)
    phi = rng.uniform(0.0, 2.0 * math.pi, n_terms)
    wavenumber = rng.choice(FORCING_WAVENUMBERS, n_terms)
    terms = tuple(
        ForcingTerm(float(a), float(w), float(p), int(l))
        for a, w, p, l in zip(amplitude, omega, phi, wavenumber)
    )
    return ForcingSpec(terms=terms, domain_length=domain_length)


def burgers_rhs(
    state: np.ndarray,
    eta: float,
    grid: Grid1D,
    forcing: Optional[ForcingSpec],
    t: float
) -> RhsField:
    v = _check_state(state, grid)
    right = np.roll(v, -1)
    face = 0.5 * (v + right)
    flux = 0.5 * face * face - eta * (right - v) / grid.dx
    rhs = -(flux - np.roll(flux, 1)) / grid.dx
    if forcing is not None:
        rhs = rhs + forcing_eval(forcing, grid.cell_centers, t)
    return rhs


def make_rhs(pde: PdeSpec, grid: Grid1D) -> RhsFunction:
    if pde.kind == PdeKind.HEAT:
        return lambda t, v: heat_rhs(v, pde.lam, grid)
    if pde.kind == PdeKind.WAVE:
        return lambda t, v: wave_rhs(v, pde.c, grid)
    return lambda t, v: burgers_rhs(v, pde.eta, grid, pde.forcing, t)


def exact_solution(
    pde: PdeSpec,
    x: Union[float, np.ndarray],
    t: float
) -> Union[float, np.ndarray]:
    k = pde.initial_condition.wavenumber
    x = np.asarray(x, dtype=np.float64)
    if pde.kind == PdeKind.HEAT:
        value = math.exp(-k * k * pde.lam * t) * np.sin(k * x)
    elif pde.kind == PdeKind.WAVE:
        value = np.sin(k * (x - pde.c * t))
    else:
        raise UnsupportedPdeError("Burgers equation has no closed-form solution")
    return float(value) if value.ndim == 0 else value


def initial_state(pde: PdeSpec, grid: Grid1D) -> np.ndarray:
    """Initial condition sampled at the cell centres."""
    k = pde.initial_condition.wavenumber
    return np.sin(k * grid.cell_centers)


def numerical_wave_speed(alpha_angle: float, c: float) -> float:
    """Propagation speed of one Fourier mode under the central flux, alpha = k dx."""
    return c * math.sin(alpha_angle) / alpha_angle


def discrete_energy(state: np.ndarray, grid: Grid1D) -> float:
    v = _check_state(state, grid)
    return float(np.sum(v * v) * grid.dx)
