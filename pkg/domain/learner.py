"""Coefficient network: forward pass, constraint modes, barrier loss, Adam training."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from domain.coarsening import TrainingSample
from domain.entities import PdeKind, SchemeCoefficients
from domain.exceptions import (
    DimensionMismatchError,
    InfeasibleCoefficientsError,
    InsufficientDataError,
    RetryLimitExceededError,
)
from domain.integrators import HistoryBuffer, lmm_step
from domain.stability import ReducedQuadratic, coefficients_from_pq, cubic_margins, quadratic_margins

logger = logging.getLogger(__name__)

HIDDEN_WIDTH = 20


class ConstraintMode(str, Enum):
    UNCONSTRAINED = "un"
    SEMI_CONSTRAINED = "semi"
    FULLY_CONSTRAINED = "full"

    @property
    def n_outputs(self) -> int:
        return 4 if self is ConstraintMode.FULLY_CONSTRAINED else 6


@dataclass(eq=False)
class MlpParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    mode: ConstraintMode

    def __post_init__(self):
        self.w1 = np.asarray(self.w1, dtype=np.float64)
        self.b1 = np.asarray(self.b1, dtype=np.float64)
        self.w2 = np.asarray(self.w2, dtype=np.float64)
        self.b2 = np.asarray(self.b2, dtype=np.float64)
        width = self.b1.shape[0]
        if self.w1.ndim != 2 or self.w1.shape[1] != width:
            raise DimensionMismatchError(f"W1 shape {self.w1.shape} does not feed {width} hidden units")
        if self.w2.shape != (width, self.mode.n_outputs) or self.b2.shape != (self.mode.n_outputs,):
            raise DimensionMismatchError(
                f"Output layer shapes {self.w2.shape}/{self.b2.shape} do not match mode {self.mode.value}"
            )

    @property
    def n_input(self) -> int:
        return self.w1.shape[0]

    def arrays(self) -> Tuple[np.ndarray, ...]:
        return self.w1, self.b1, self.w2, self.b2

    def copy(self) -> "MlpParams":
        return MlpParams(*(a.copy() for a in self.arrays()), mode=self.mode)


@dataclass(frozen=True)
class LossConfig:
    gamma: float
    learning_rate: float
    n_steps: int
    weight_range: Tuple[float, float]
    output_bias: Tuple[float, ...]
    epsilon: float = 1e-8
    seed: int = 0
    max_retries: int = 10
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"Barrier weight must be non-negative, got {self.gamma}")
        if self.epsilon <= 0:
            raise ValueError(f"Barrier regularizer must be positive, got {self.epsilon}")
        if self.n_steps < 0:
            raise ValueError(f"Step count must be non-negative, got {self.n_steps}")
        if self.max_retries < 1:
            raise ValueError("At least one training attempt is required")
        lo, hi = self.weight_range
        if lo > hi:
            raise ValueError(f"Weight range is reversed: {self.weight_range}")
        object.__setattr__(self, "output_bias", tuple(float(b) for b in self.output_bias))


@dataclass(frozen=True)
class TrainingLogEntry:
    attempt: int
    step: int
    mse: float
    barrier: float
    loss: float


@dataclass
class TrainingLog:
    entries: List[TrainingLogEntry] = field(default_factory=list)
    attempts: int = 0
    rejected: List[Dict[str, float]] = field(default_factory=list)

    @property
    def final_entries(self) -> List[TrainingLogEntry]:
        return [e for e in self.entries if e.attempt == self.attempts - 1]


@dataclass(frozen=True)
class LossTerms:
    mse: float
    barrier: float
    loss: float


ADAMS3_RAW = (0.0, 0.0, -1.0, 5 / 12, -4 / 3, 23 / 12)
ADAMS3_PQ = (0.0, 0.0, 5 / 12, -4 / 3)
# Burgers biases as published; they differ from Adams-3 in beta_0
BURGERS_RAW = (0.0, 0.0, -1.0, 1 / 2, -4 / 3, 23 / 12)
BURGERS_PQ = (0.0, 0.0, 1 / 3, -4 / 3)

_N_STEPS = {PdeKind.HEAT: 8000, PdeKind.WAVE: 30000, PdeKind.BURGERS: 8000}
_LEARNING_RATE = {
    ConstraintMode.UNCONSTRAINED: 1e-7,
    ConstraintMode.SEMI_CONSTRAINED: 1e-7,
    ConstraintMode.FULLY_CONSTRAINED: 5e-7,
}
# Adam moves each weight by at most ~lr per step; the wave phase fix needs sigma(1) to grow by ~0.1
_KIND_LEARNING_RATE = {
    PdeKind.WAVE: {ConstraintMode.UNCONSTRAINED: 2e-6, ConstraintMode.SEMI_CONSTRAINED: 2e-6},
}
_GAMMA = {
    PdeKind.HEAT: {ConstraintMode.SEMI_CONSTRAINED: 1e-18, ConstraintMode.FULLY_CONSTRAINED: 1e-12},
    PdeKind.WAVE: {ConstraintMode.SEMI_CONSTRAINED: 1e-14, ConstraintMode.FULLY_CONSTRAINED: 1e-12},
    PdeKind.BURGERS: {ConstraintMode.SEMI_CONSTRAINED: 1e-15, ConstraintMode.FULLY_CONSTRAINED: 1e-12},
}
_WEIGHT_RANGE = {
    PdeKind.HEAT: {
        ConstraintMode.UNCONSTRAINED: (-5e-4, 5e-4),
        ConstraintMode.SEMI_CONSTRAINED: (-5e-4, 5e-4),
        ConstraintMode.FULLY_CONSTRAINED: (-5e-3, 5e-3),
    },
    PdeKind.WAVE: {
        ConstraintMode.UNCONSTRAINED: (-5e-4, 5e-4),
        ConstraintMode.SEMI_CONSTRAINED: (0.0, 5e-4),
        ConstraintMode.FULLY_CONSTRAINED: (-5e-3, 5e-3),
    },
    PdeKind.BURGERS: {
        ConstraintMode.UNCONSTRAINED: (-1e-4, 1e-4),
        ConstraintMode.SEMI_CONSTRAINED: (-1e-3, 1e-3),
        ConstraintMode.FULLY_CONSTRAINED: (-1e-2, 1e-2),
    },
}


def default_output_bias(kind: PdeKind, mode: ConstraintMode) -> Tuple[float, ...]:
    if kind == PdeKind.BURGERS:
        return BURGERS_PQ if mode == ConstraintMode.FULLY_CONSTRAINED else BURGERS_RAW
    return ADAMS3_PQ if mode == ConstraintMode.FULLY_CONSTRAINED else ADAMS3_RAW


def preset_learning_rate(kind: PdeKind, mode: ConstraintMode) -> float:
    return _KIND_LEARNING_RATE.get(kind, {}).get(mode, _LEARNING_RATE[mode])


def preset_loss_config(
    kind: PdeKind,
    mode: ConstraintMode,
    seed: int = 0,
    epsilon: float = 1e-8,
    max_retries: int = 10,
    n_steps: Optional[int] = None,
    learning_rate: Optional[float] = None,
    gamma: Optional[float] = None,
    weight_range: Optional[Tuple[float, float]] = None,
    output_bias: Optional[Sequence[float]] = None
) -> LossConfig:
    """Published training settings for a PDE family and mode, with optional overrides."""
    return LossConfig(
        gamma=gamma if gamma is not None else _GAMMA[kind].get(mode, 0.0),
        learning_rate=learning_rate if learning_rate is not None else preset_learning_rate(kind, mode),
        n_steps=n_steps if n_steps is not None else _N_STEPS[kind],
        weight_range=tuple(weight_range) if weight_range is not None else _WEIGHT_RANGE[kind][mode],
        output_bias=tuple(output_bias) if output_bias is not None else default_output_bias(kind, mode),
        epsilon=epsilon,
        seed=seed,
        max_retries=max_retries,
    )


def normalize(state: np.ndarray) -> np.ndarray:
    x = np.asarray(state, dtype=np.float64)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def init_params(n_input: int, mode: ConstraintMode, cfg: LossConfig, rng: np.random.Generator) -> MlpParams:
    if len(cfg.output_bias) != mode.n_outputs:
        raise DimensionMismatchError(
            f"Mode {mode.value} needs {mode.n_outputs} output biases, got {len(cfg.output_bias)}"
        )
    lo, hi = cfg.weight_range
    return MlpParams(
        w1=rng.uniform(lo, hi, (n_input, HIDDEN_WIDTH)),
        b1=np.zeros(HIDDEN_WIDTH),
        w2=rng.uniform(lo, hi, (HIDDEN_WIDTH, mode.n_outputs)),
        b2=np.array(cfg.output_bias),
        mode=mode,
    )


def _forward(params: MlpParams, state: np.ndarray):
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (params.n_input,):
        raise DimensionMismatchError(f"Network expects {params.n_input} inputs, got shape {state.shape}")
    x = normalize(state)
    pre = x @ params.w1 + params.b1
    hidden = np.maximum(pre, 0.0)
    return x, pre, hidden, hidden @ params.w2 + params.b2


def mlp_forward(params: MlpParams, state: np.ndarray) -> np.ndarray:
    return _forward(params, state)[-1]


def map_outputs(mode: ConstraintMode, raw: Sequence[float]) -> SchemeCoefficients:
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape != (mode.n_outputs,):
        raise DimensionMismatchError(f"Mode {mode.value} emits {mode.n_outputs} outputs, got {raw.shape}")
    if mode == ConstraintMode.FULLY_CONSTRAINED:
        return coefficients_from_pq(ReducedQuadratic(raw[0], raw[1]), raw[2:4])
    return SchemeCoefficients(alpha=tuple(raw[:3]), beta=tuple(raw[3:]))


def barrier(mode: ConstraintMode, raw: Sequence[float], epsilon: float = 1e-8) -> float:
    """Interior penalty on the raw outputs: B1 over the cubic margins, B2 over (p, q)."""
    raw = np.asarray(raw, dtype=np.float64)
    if mode == ConstraintMode.UNCONSTRAINED:
        return 0.0
    if mode == ConstraintMode.SEMI_CONSTRAINED:
        g = cubic_margins(raw[:3])
        return float(np.sum(1.0 / (np.abs(g) + epsilon)))
    g = quadratic_margins(raw[0], raw[1])
    if np.any(g <= 0):
        raise InfeasibleCoefficientsError(
            f"(p, q) = ({raw[0]:.6g}, {raw[1]:.6g}) left the feasible region, margins {g.tolist()}"
        )
    return float(np.sum(1.0 / g))


def barrier_gradient(mode: ConstraintMode, raw: Sequence[float], epsilon: float = 1e-8) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    grad = np.zeros(mode.n_outputs)
    if mode == ConstraintMode.UNCONSTRAINED:
        return grad
    if mode == ConstraintMode.SEMI_CONSTRAINED:
        a0, a1, a2 = raw[:3]
        g = cubic_margins(raw[:3])
        d_g = -np.sign(g) / (np.abs(g) + epsilon) ** 2
        # rows: d g_i / d (a0, a1, a2)
        jac = np.array([
            [-1.0, 1.0, -1.0],
            [1.0, 1.0, 1.0],
            [a2 - 2.0 * a0, -1.0, a0],
            [-1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
        ])
        grad[:3] = d_g @ jac
        return grad
    g = quadratic_margins(raw[0], raw[1])
    if np.any(g <= 0):
        raise InfeasibleCoefficientsError(f"Barrier gradient undefined outside the feasible region, margins {g.tolist()}")
    d_g = -1.0 / g ** 2
    jac = np.array([
        [-1.0, 1.0],
        [0.0, -1.0],
        [1.0, 1.0],
    ])
    grad[:2] = d_g @ jac
    return grad


def _sample_history(sample: TrainingSample) -> HistoryBuffer:
    return HistoryBuffer(states=sample.history, rhs=sample.rhs, dt=sample.dt, t_now=sample.t_n)


def _loss_terms(mode: ConstraintMode, raw: np.ndarray, sample: TrainingSample, cfg: LossConfig):
    coeffs = map_outputs(mode, raw)
    residual = lmm_step(coeffs, _sample_history(sample)) - sample.target
    mse = float(np.mean(residual * residual))
    b = barrier(mode, raw, cfg.epsilon)
    gamma = 0.0 if mode == ConstraintMode.UNCONSTRAINED else cfg.gamma
    return LossTerms(mse=mse, barrier=b, loss=mse + gamma * b), residual, gamma


def loss(mode: ConstraintMode, params: MlpParams, sample: TrainingSample, cfg: LossConfig) -> float:
    raw = mlp_forward(params, sample.input_state)
    return _loss_terms(mode, raw, sample, cfg)[0].loss


def loss_and_gradient(
    mode: ConstraintMode,
    params: MlpParams,
    sample: TrainingSample,
    cfg: LossConfig
) -> Tuple[LossTerms, Tuple[np.ndarray, ...]]:
    """Loss terms and gradients with respect to (W1, b1, W2, b2)."""
    x, pre, hidden, raw = _forward(params, sample.input_state)
    terms, residual, gamma = _loss_terms(mode, raw, sample, cfg)

    d_pred = 2.0 * residual / residual.size
    d_alpha = np.array([-np.dot(d_pred, v) for v in sample.history])
    d_beta = np.array([sample.dt * np.dot(d_pred, f) for f in sample.rhs])

    if mode == ConstraintMode.FULLY_CONSTRAINED:
        # alpha = (-q, q - p, p - 1), beta_2 = 1 + p + q - beta_0 - beta_1
        d_raw = np.array([
            d_alpha[2] - d_alpha[1] + d_beta[2],
            d_alpha[1] - d_alpha[0] + d_beta[2],
            d_beta[0] - d_beta[2],
            d_beta[1] - d_beta[2],
        ])
    else:
        d_raw = np.concatenate([d_alpha, d_beta])
    if gamma:
        d_raw = d_raw + gamma * barrier_gradient(mode, raw, cfg.epsilon)

    d_w2 = np.outer(hidden, d_raw)
    d_hidden = params.w2 @ d_raw
    d_pre = d_hidden * (pre > 0)
    d_w1 = np.outer(x, d_pre)
    return terms, (d_w1, d_pre, d_w2, d_raw)


def output_margins(mode: ConstraintMode, raw: Sequence[float]) -> np.ndarray:
    """Routh-Hurwitz margins of the raw outputs: cubic on alpha, quadratic on (p, q)."""
    raw = np.asarray(raw, dtype=np.float64)
    if mode == ConstraintMode.FULLY_CONSTRAINED:
        return quadratic_margins(raw[0], raw[1])
    return cubic_margins(raw[:3])


def constraint_violations(params: MlpParams, states: Sequence[np.ndarray]) -> Dict[str, float]:
    """Inputs whose emitted scheme sits on or outside the strict stability region."""
    worst = np.inf
    violating = 0
    for state in states:
        margins = output_margins(params.mode, mlp_forward(params, state))
        worst = min(worst, float(margins.min()))
        if np.any(margins <= 0):
            violating += 1
    return {"violating_samples": float(violating), "n_samples": float(len(states)), "worst_margin": worst}


def semi_violations(params: MlpParams, dataset: Sequence[TrainingSample]) -> Dict[str, float]:
    return constraint_violations(params, [sample.input_state for sample in dataset])


def _adam_run(
    mode: ConstraintMode,
    params: MlpParams,
    dataset: Sequence[TrainingSample],
    cfg: LossConfig,
    attempt: int,
    log: TrainingLog
) -> MlpParams:
    beta1, beta2 = cfg.adam_betas
    arrays = [a.copy() for a in params.arrays()]
    m = [np.zeros_like(a) for a in arrays]
    v = [np.zeros_like(a) for a in arrays]
    current = params
    for t in range(cfg.n_steps):
        sample = dataset[t % len(dataset)]
        terms, grads = loss_and_gradient(mode, current, sample, cfg)
        log.entries.append(TrainingLogEntry(attempt, t, terms.mse, terms.barrier, terms.loss))
        for i, g in enumerate(grads):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
            m_hat = m[i] / (1.0 - beta1 ** (t + 1))
            v_hat = v[i] / (1.0 - beta2 ** (t + 1))
            arrays[i] = arrays[i] - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon)
        current = MlpParams(*arrays, mode=mode)
    return current


def train(
    mode: ConstraintMode,
    dataset: Sequence[TrainingSample],
    cfg: LossConfig,
    log: Optional[TrainingLog] = None
) -> MlpParams:
    if not dataset:
        raise InsufficientDataError("Cannot train on an empty dataset")
    log = log if log is not None else TrainingLog()
    n_input = dataset[0].grid.n_cells
    attempts = cfg.max_retries if mode == ConstraintMode.SEMI_CONSTRAINED else 1

    stats: Dict[str, float] = {}
    for attempt in range(attempts):
        rng = np.random.default_rng(cfg.seed + attempt)
        params = init_params(n_input, mode, cfg, rng)
        log.attempts = attempt + 1
        trained = _adam_run(mode, params, dataset, cfg, attempt, log)
        if mode != ConstraintMode.SEMI_CONSTRAINED:
            return trained
        stats = semi_violations(trained, dataset)
        if stats["violating_samples"] == 0:
            return trained
        log.rejected.append(stats)
        logger.warning(
            f"Semi-constrained attempt {attempt + 1}/{attempts} left the stable region on "
            f"{int(stats['violating_samples'])} samples (worst margin {stats['worst_margin']:.3g}), retraining"
        )
    raise RetryLimitExceededError(
        f"Semi-constrained training failed the root condition after {attempts} attempts",
        attempts=attempts,
        violations=stats,
    )


def extract_constant_coefficients(
    params: MlpParams,
    dataset: Sequence[TrainingSample],
    decimals: int = 6
) -> SchemeCoefficients:
    if not dataset:
        raise InsufficientDataError("Constant extraction needs at least one sample")
    vectors = np.array([
        map_outputs(params.mode, mlp_forward(params, s.input_state)).as_vector() for s in dataset
    ])
    mean = np.round(vectors.mean(axis=0), decimals)
    k = len(mean) // 2
    return SchemeCoefficients(alpha=tuple(mean[:k]), beta=tuple(mean[k:]))


class NetworkCoefficientProvider:
    """Queries the network with the leading ``n_input`` cells of each state."""

    k = 3

    def __init__(self, params: MlpParams):
        self.params = params

    def coefficients(self, state: np.ndarray, step: int) -> SchemeCoefficients:
        state = np.asarray(state)
        if state.shape[0] < self.params.n_input:
            raise DimensionMismatchError(
                f"State has {state.shape[0]} cells, network needs at least {self.params.n_input}"
            )
        raw = mlp_forward(self.params, state[:self.params.n_input])
        return map_outputs(self.params.mode, raw)
