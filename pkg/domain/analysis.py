"""Error metrics, single-mode phase analysis and paired statistics."""
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import special

from domain.entities import FieldSeries, Grid1D, SchemeCoefficients
from domain.exceptions import DegenerateFitError, DimensionMismatchError, InsufficientDataError, PhaseAnalysisError
from domain.integrators import HistoryBuffer, lmm_step
from domain.spatial import wave_rhs

# levels n, n-1, n-2 paired with scheme index 2, 1, 0
_PHASE_LEVELS = ((0, 2), (-1, 1), (-2, 0))
_STENCIL = (-1, 0, 1)


@dataclass(frozen=True, eq=False)
class ErrorReport:
    times: np.ndarray
    mse_instant: np.ndarray
    mae_instant: np.ndarray
    mse_cumulative: np.ndarray
    mae_cumulative: np.ndarray

    @property
    def mse_total(self) -> float:
        return float(self.mse_cumulative[-1])

    @property
    def mae_total(self) -> float:
        return float(self.mae_cumulative[-1])

    @property
    def max_mse(self) -> float:
        return float(self.mse_cumulative.max())

    @property
    def max_mae(self) -> float:
        return float(self.mae_cumulative.max())

    def _index(self, t: float) -> int:
        dt = self.times[1] - self.times[0] if len(self.times) > 1 else 1.0
        index = int(round((t - self.times[0]) / dt))
        if not 0 <= index < len(self.times):
            raise ValueError(f"t={t} is outside the report window [{self.times[0]}, {self.times[-1]}]")
        return index

    def mse_until(self, t: float) -> float:
        return float(self.mse_cumulative[self._index(t)])

    def mae_until(self, t: float) -> float:
        return float(self.mae_cumulative[self._index(t)])


def error_report(pred: FieldSeries, truth: FieldSeries) -> ErrorReport:
    if pred.values.shape != truth.values.shape:
        raise DimensionMismatchError(
            f"Prediction shape {pred.values.shape} differs from truth {truth.values.shape}"
        )
    if not math.isclose(pred.dt, truth.dt, rel_tol=1e-12) or not math.isclose(pred.t0, truth.t0, abs_tol=1e-12):
        raise DimensionMismatchError("Prediction and truth are sampled at different times")
    err = pred.values - truth.values
    sq = np.mean(err * err, axis=1)
    ab = np.mean(np.abs(err), axis=1)
    counts = np.arange(1, len(sq) + 1)
    return ErrorReport(
        times=truth.times,
        mse_instant=sq,
        mae_instant=ab,
        mse_cumulative=np.cumsum(sq) / counts,
        mae_cumulative=np.cumsum(ab) / counts,
    )


def spatial_phase_lag(alpha_angle: float, c: float, dt: float) -> float:
    """Per-step lag of the central flux, (1 - sin a / a) c dt."""
    return float((1.0 - np.sinc(alpha_angle / math.pi)) * c * dt)


@dataclass(frozen=True)
class PhaseReport:
    amplitude: float
    displacement: float
    time_averaged: bool
    gamma: float
    b2: float


def _wrap_displacement(d: float, wavenumber: float) -> float:
    half = math.pi / wavenumber
    wrapped = (d + half) % (2.0 * half) - half
    # (-half, half]
    return half if wrapped == -half else wrapped


def phase_displacement(
    coeffs: SchemeCoefficients,
    dx: float,
    dt: float,
    c: float,
    wavenumber: float
) -> PhaseReport:
    if coeffs.k != 3:
        raise PhaseAnalysisError(f"Phase analysis is defined for 3-step schemes, got k={coeffs.k}")
    if wavenumber <= 0:
        raise PhaseAnalysisError(f"Wavenumber must be positive, got {wavenumber}")
    r = c * dt / (2.0 * dx)
    amplitudes = []
    offsets = []
    for xi, i in _PHASE_LEVELS:
        a, b = coeffs.alpha[i], coeffs.beta[i]
        for ell, weight in zip(_STENCIL, (b * r, -a, -b * r)):
            amplitudes.append(weight)
            offsets.append(wavenumber * (ell * dx - xi * c * dt))
    amplitudes = np.array(amplitudes)
    offsets = np.array(offsets)

    s = math.fsum(amplitudes * np.sin(offsets))
    co = math.fsum(amplitudes * np.cos(offsets))
    b1 = math.hypot(s, co)
    if b1 <= 1e-300:
        raise PhaseAnalysisError("Scheme annihilates the mode; phase is undefined")
    gamma = math.atan2(s, co)
    # the fitted sinusoid must reproduce the amplitude at the recovered phase
    b2 = math.fsum(amplitudes * np.cos(offsets - gamma))
    return PhaseReport(
        amplitude=b1,
        displacement=_wrap_displacement(-gamma / wavenumber, wavenumber),
        time_averaged=False,
        gamma=gamma,
        b2=b2,
    )


def one_step_phase_fit(
    coeffs: SchemeCoefficients,
    dx: float,
    dt: float,
    c: float,
    wavenumber: float,
    n_cells: int = 16
) -> PhaseReport:
    """Advance an exact sinusoidal history one step on a periodic grid and fit the result."""
    grid = Grid1D(n_cells, n_cells * dx)
    x = grid.cell_centers
    levels = [np.sin(wavenumber * (x - c * xi * dt)) for xi in (-2, -1, 0)]
    history = HistoryBuffer(
        states=tuple(levels),
        rhs=tuple(wave_rhs(v, c, grid) for v in levels),
        dt=dt,
        t_now=0.0,
    )
    nxt = lmm_step(coeffs, history)
    basis = np.column_stack([np.sin(wavenumber * x), np.cos(wavenumber * x)])
    (a, b), *_ = np.linalg.lstsq(basis, nxt, rcond=None)
    amplitude = math.hypot(a, b)
    if amplitude <= 1e-300:
        raise PhaseAnalysisError("Fitted amplitude vanished")
    phi = math.atan2(b, a)
    return PhaseReport(
        amplitude=amplitude,
        displacement=_wrap_displacement(-phi / wavenumber, wavenumber),
        time_averaged=False,
        gamma=phi,
        b2=amplitude,
    )


def mean_phase_displacement(
    history: Sequence[SchemeCoefficients],
    dx: float,
    dt: float,
    c: float,
    wavenumber: float
) -> PhaseReport:
    if not history:
        raise InsufficientDataError("No recorded coefficients to average")
    reports = [phase_displacement(coeffs, dx, dt, c, wavenumber) for coeffs in history]
    distinct = {coeffs.as_vector().tobytes() for coeffs in history}
    return PhaseReport(
        amplitude=float(np.mean([r.amplitude for r in reports])),
        displacement=float(np.mean([r.displacement for r in reports])),
        time_averaged=len(distinct) > 1,
        gamma=float(np.mean([r.gamma for r in reports])),
        b2=float(np.mean([r.b2 for r in reports])),
    )


def fit_slope_through_origin(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    denom = float(np.dot(xs, xs))
    if len(xs) == 0 or denom == 0.0:
        raise DegenerateFitError("Slope fit needs at least one non-zero abscissa")
    return float(np.dot(xs, ys) / denom)


class PairedTTest(NamedTuple):
    statistic: float
    p_value: float


def paired_ttest(xs: Sequence[float], ys: Sequence[float]) -> PairedTTest:
    """Two-sided paired Student t-test of xs against ys."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DimensionMismatchError(f"Paired samples must be equal-length vectors, got {xs.shape} and {ys.shape}")
    n = len(xs)
    if n < 2:
        raise InsufficientDataError(f"Paired t-test needs at least 2 pairs, got {n}")
    d = xs - ys
    if np.all(d == 0):
        return PairedTTest(0.0, 1.0)
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        return PairedTTest(math.copysign(math.inf, mean), 0.0)
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    return PairedTTest(t, p)


@dataclass(frozen=True, eq=False)
class SampleSummary:
    reductions: np.ndarray
    candidate_mean: float
    baseline_mean: float

    @property
    def mean_reduction(self) -> float:
        return 100.0 * (self.baseline_mean - self.candidate_mean) / self.baseline_mean


def summarize_samples(candidate: Sequence[float], baseline: Sequence[float]) -> SampleSummary:
    candidate = np.asarray(candidate, dtype=np.float64)
    baseline = np.asarray(baseline, dtype=np.float64)
    if candidate.shape != baseline.shape:
        raise DimensionMismatchError("Candidate and baseline columns differ in length")
    if np.any((baseline == 0) & (candidate != 0)):
        raise DegenerateFitError("Reduction is undefined against a zero baseline error")
    with np.errstate(divide="ignore", invalid="ignore"):
        reductions = np.where(baseline == 0, 0.0, 100.0 * (baseline - candidate) / baseline)
    return SampleSummary(
        reductions=reductions,
        candidate_mean=float(np.mean(candidate)),
        baseline_mean=float(np.mean(baseline)),
    )


def convergence_order(
    solve: Callable[[float], float],
    exact_value: float,
    dt_list: Sequence[float],
    floor: float = 1e-13
) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    if len(dt_list) < 3:
        raise InsufficientDataError(f"Order fit needs at least 3 step sizes, got {len(dt_list)}")
    errors = np.array([abs(solve(dt) - exact_value) for dt in dt_list])
    if np.any(errors <= floor * max(1.0, abs(exact_value))):
        raise DegenerateFitError(f"Errors {errors.tolist()} reach round-off; order is undefined")
    slope, _ = np.polyfit(np.log(dt_list), np.log(errors), 1)
    return float(slope)
