import numpy as np
import pytest

from domain.coarsening import TrainingSample, build_training_set
from domain.entities import Grid1D, PdeKind, PdeSpec
from domain.exceptions import (
    DimensionMismatchError,
    InfeasibleCoefficientsError,
    InsufficientDataError,
    RetryLimitExceededError,
)
from domain.integrators import exact_series
from domain.learner import (
    ADAMS3_PQ,
    ADAMS3_RAW,
    BURGERS_PQ,
    HIDDEN_WIDTH,
    ConstraintMode,
    LossConfig,
    MlpParams,
    NetworkCoefficientProvider,
    TrainingLog,
    barrier,
    barrier_gradient,
    constraint_violations,
    extract_constant_coefficients,
    init_params,
    loss,
    loss_and_gradient,
    map_outputs,
    mlp_forward,
    normalize,
    preset_loss_config,
    semi_violations,
    train,
)
from domain.stability import check_consistency, quadratic_margins


N_CELLS = 8

INTERIOR_BIAS = {
    ConstraintMode.UNCONSTRAINED: (0.0, 0.0, -0.5, 0.4, -0.3, 0.9),
    ConstraintMode.SEMI_CONSTRAINED: (0.0, 0.0, -0.5, 0.4, -0.3, 0.9),
    ConstraintMode.FULLY_CONSTRAINED: (0.1, 0.05, 0.4, -0.3),
}


def _config(mode, **overrides):
    values = dict(
        gamma=1e-3,
        learning_rate=1e-6,
        n_steps=0,
        weight_range=(-0.1, 0.1),
        output_bias=INTERIOR_BIAS[mode],
    )
    values.update(overrides)
    return LossConfig(**values)


def _random_sample(rng):
    grid = Grid1D(N_CELLS, 1.0)
    vectors = [rng.normal(size=N_CELLS) for _ in range(7)]
    return TrainingSample(
        history=tuple(vectors[:3]),
        target=vectors[3],
        rhs=tuple(vectors[4:]),
        pde=PdeSpec(PdeKind.HEAT, lam=0.5),
        grid=grid,
        dt=0.1,
        t_n=0.0,
    )


def _random_params(mode, rng):
    return MlpParams(
        w1=rng.uniform(-0.1, 0.1, (N_CELLS, HIDDEN_WIDTH)),
        b1=rng.uniform(-0.1, 0.1, HIDDEN_WIDTH),
        w2=rng.uniform(-0.1, 0.1, (HIDDEN_WIDTH, mode.n_outputs)),
        b2=np.array(INTERIOR_BIAS[mode]),
        mode=mode,
    )


def _numeric_gradient(mode, params, sample, cfg, h=1e-6):
    grads = []
    for index in range(4):
        base = params.arrays()[index]
        grad = np.zeros_like(base)
        for pos in np.ndindex(base.shape):
            values = []
            for sign in (1.0, -1.0):
                arrays = [a.copy() for a in params.arrays()]
                arrays[index][pos] += sign * h
                values.append(loss(mode, MlpParams(*arrays, mode=mode), sample, cfg))
            grad[pos] = (values[0] - values[1]) / (2.0 * h)
        grads.append(grad)
    return grads


def _heat_dataset(n_levels=12):
    pde = PdeSpec(PdeKind.HEAT, lam=0.5)
    truth = exact_series(pde, Grid1D(32, 1.0), 4, 1e-3, (n_levels - 1) * 1e-3)
    return build_training_set(truth, 1, pde)


@pytest.mark.parametrize("mode", list(ConstraintMode))
def test_gradient_matches_finite_differences(mode):
    rng = np.random.default_rng(10)
    for _ in range(20):
        params = _random_params(mode, rng)
        sample = _random_sample(rng)
        cfg = _config(mode)
        _, analytic = loss_and_gradient(mode, params, sample, cfg)
        numeric = _numeric_gradient(mode, params, sample, cfg)
        scale = max(float(np.max(np.abs(g))) for g in numeric)
        for a, n in zip(analytic, numeric):
            np.testing.assert_allclose(a, n, rtol=1e-4, atol=1e-6 * scale)


def test_loss_terms_of_unconstrained_mode_ignore_gamma():
    rng = np.random.default_rng(11)
    mode = ConstraintMode.UNCONSTRAINED
    terms, _ = loss_and_gradient(mode, _random_params(mode, rng), _random_sample(rng), _config(mode, gamma=5.0))
    assert terms.barrier == 0.0
    assert terms.loss == terms.mse


def test_semi_loss_adds_weighted_barrier():
    rng = np.random.default_rng(12)
    mode = ConstraintMode.SEMI_CONSTRAINED
    terms, _ = loss_and_gradient(mode, _random_params(mode, rng), _random_sample(rng), _config(mode))
    assert terms.barrier > 0
    assert terms.loss == pytest.approx(terms.mse + 1e-3 * terms.barrier)


def test_barrier_grows_near_quadratic_boundary():
    raw = (0.0, 1.0 - 5e-7, 0.0, 0.0)
    assert np.min(quadratic_margins(raw[0], raw[1])) < 1e-6
    assert barrier(ConstraintMode.FULLY_CONSTRAINED, raw) > 1e6


def test_barrier_at_adams3_boundary():
    eps = 1e-8
    interior = 1.0 / 2.0 + 1.0 + 1.0 + 1.0
    value = barrier(ConstraintMode.SEMI_CONSTRAINED, ADAMS3_RAW, epsilon=eps)
    assert value == pytest.approx(1.0 / eps + interior, rel=1e-2)


def test_quadratic_barrier_rejects_infeasible_outputs():
    with pytest.raises(InfeasibleCoefficientsError):
        barrier(ConstraintMode.FULLY_CONSTRAINED, (0.0, 1.5, 0.0, 0.0))
    with pytest.raises(InfeasibleCoefficientsError):
        barrier_gradient(ConstraintMode.FULLY_CONSTRAINED, (3.0, 0.0, 0.0, 0.0))


def test_unconstrained_barrier_is_zero():
    assert barrier(ConstraintMode.UNCONSTRAINED, ADAMS3_RAW) == 0.0
    np.testing.assert_array_equal(barrier_gradient(ConstraintMode.UNCONSTRAINED, ADAMS3_RAW), np.zeros(6))


def test_barrier_gradient_matches_finite_differences():
    raw = np.array([0.1, -0.2, -0.4, 0.0, 0.0, 0.0])
    h = 1e-7
    grad = barrier_gradient(ConstraintMode.SEMI_CONSTRAINED, raw)
    for i in range(3):
        step = np.zeros(6)
        step[i] = h
        numeric = (
            barrier(ConstraintMode.SEMI_CONSTRAINED, raw + step)
            - barrier(ConstraintMode.SEMI_CONSTRAINED, raw - step)
        ) / (2 * h)
        assert grad[i] == pytest.approx(numeric, rel=1e-5)


def test_map_outputs_modes():
    coeffs = map_outputs(ConstraintMode.UNCONSTRAINED, ADAMS3_RAW)
    assert coeffs.alpha == (0.0, 0.0, -1.0)
    full = map_outputs(ConstraintMode.FULLY_CONSTRAINED, ADAMS3_PQ)
    assert check_consistency(full)
    np.testing.assert_allclose(full.beta, coeffs.beta, atol=1e-13)
    with pytest.raises(DimensionMismatchError):
        map_outputs(ConstraintMode.FULLY_CONSTRAINED, ADAMS3_RAW)


def test_normalize():
    np.testing.assert_allclose(normalize(np.array([2.0, 4.0, 3.0])), [0.0, 1.0, 0.5])
    np.testing.assert_array_equal(normalize(np.full(4, 7.0)), np.zeros(4))


def test_init_params_shapes_and_biases():
    mode = ConstraintMode.SEMI_CONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode)
    params = init_params(16, mode, cfg, np.random.default_rng(0))
    assert params.w1.shape == (16, HIDDEN_WIDTH)
    assert params.w2.shape == (HIDDEN_WIDTH, 6)
    np.testing.assert_array_equal(params.b1, np.zeros(HIDDEN_WIDTH))
    np.testing.assert_allclose(params.b2, ADAMS3_RAW)
    assert np.all(np.abs(params.w1) <= 5e-4)


def test_init_params_rejects_wrong_bias_length():
    mode = ConstraintMode.FULLY_CONSTRAINED
    cfg = _config(mode, output_bias=ADAMS3_RAW)
    with pytest.raises(DimensionMismatchError):
        init_params(8, mode, cfg, np.random.default_rng(0))


def test_initial_network_emits_near_adams3():
    mode = ConstraintMode.UNCONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode)
    params = init_params(16, mode, cfg, np.random.default_rng(0))
    raw = mlp_forward(params, np.sin(np.linspace(0, 6, 16)))
    np.testing.assert_allclose(raw, ADAMS3_RAW, atol=1e-4)


def test_forward_rejects_wrong_input():
    mode = ConstraintMode.UNCONSTRAINED
    params = _random_params(mode, np.random.default_rng(0))
    with pytest.raises(DimensionMismatchError):
        mlp_forward(params, np.zeros(N_CELLS + 1))


def test_params_shape_validation():
    with pytest.raises(DimensionMismatchError):
        MlpParams(np.zeros((4, 20)), np.zeros(20), np.zeros((20, 6)), np.zeros(6), ConstraintMode.FULLY_CONSTRAINED)
    with pytest.raises(DimensionMismatchError):
        MlpParams(np.zeros((4, 10)), np.zeros(20), np.zeros((20, 6)), np.zeros(6), ConstraintMode.UNCONSTRAINED)


def test_loss_config_validation():
    with pytest.raises(ValueError):
        _config(ConstraintMode.UNCONSTRAINED, gamma=-1.0)
    with pytest.raises(ValueError):
        _config(ConstraintMode.UNCONSTRAINED, epsilon=0.0)
    with pytest.raises(ValueError):
        _config(ConstraintMode.UNCONSTRAINED, weight_range=(1.0, -1.0))
    with pytest.raises(ValueError):
        _config(ConstraintMode.UNCONSTRAINED, max_retries=0)


def test_presets():
    heat_semi = preset_loss_config(PdeKind.HEAT, ConstraintMode.SEMI_CONSTRAINED)
    assert heat_semi.gamma == 1e-18
    assert heat_semi.learning_rate == 1e-7
    assert heat_semi.n_steps == 8000
    wave_semi = preset_loss_config(PdeKind.WAVE, ConstraintMode.SEMI_CONSTRAINED)
    assert wave_semi.weight_range == (0.0, 5e-4)
    assert wave_semi.n_steps == 30_000
    assert wave_semi.learning_rate == 2e-6
    assert wave_semi.gamma == 1e-14
    assert preset_loss_config(PdeKind.WAVE, ConstraintMode.UNCONSTRAINED).learning_rate == 2e-6
    assert preset_loss_config(PdeKind.WAVE, ConstraintMode.FULLY_CONSTRAINED).learning_rate == 5e-7
    assert preset_loss_config(PdeKind.HEAT, ConstraintMode.UNCONSTRAINED).learning_rate == 1e-7
    burgers_full = preset_loss_config(PdeKind.BURGERS, ConstraintMode.FULLY_CONSTRAINED)
    assert burgers_full.output_bias == BURGERS_PQ
    assert burgers_full.learning_rate == 5e-7
    assert preset_loss_config(PdeKind.HEAT, ConstraintMode.UNCONSTRAINED).gamma == 0.0
    overridden = preset_loss_config(PdeKind.HEAT, ConstraintMode.FULLY_CONSTRAINED, n_steps=5, gamma=0.5)
    assert (overridden.n_steps, overridden.gamma) == (5, 0.5)


def test_zero_step_training_returns_initialization():
    dataset = _heat_dataset()
    mode = ConstraintMode.FULLY_CONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=0, seed=3)
    trained = train(mode, dataset, cfg)
    expected = init_params(dataset[0].grid.n_cells, mode, cfg, np.random.default_rng(3))
    for a, b in zip(trained.arrays(), expected.arrays()):
        np.testing.assert_array_equal(a, b)


def test_training_step_lowers_loss():
    dataset = _heat_dataset()[:1]
    mode = ConstraintMode.UNCONSTRAINED
    bias = (0.0, 0.0, -1.0, 5 / 12, -4 / 3, 23 / 12 + 0.5)
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=2, learning_rate=1e-6, output_bias=bias)
    log = TrainingLog()
    train(mode, dataset, cfg, log)
    assert [e.step for e in log.entries] == [0, 1]
    assert log.entries[1].loss < log.entries[0].loss


def test_training_reduces_error():
    dataset = _heat_dataset()[:1]
    mode = ConstraintMode.UNCONSTRAINED
    bias = (0.0, 0.0, -1.0, 5 / 12, -4 / 3, 23 / 12 + 0.5)
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=30, learning_rate=1e-4, output_bias=bias)
    log = TrainingLog()
    train(mode, dataset, cfg, log)
    assert log.attempts == 1
    assert log.entries[-1].mse < log.entries[0].mse


def test_semi_training_retries_then_gives_up():
    dataset = _heat_dataset()
    mode = ConstraintMode.SEMI_CONSTRAINED
    # alpha_0 = 2 puts a root outside the unit disc
    bias = (2.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=0, max_retries=2, output_bias=bias)
    log = TrainingLog()
    with pytest.raises(RetryLimitExceededError) as exc:
        train(mode, dataset, cfg, log)
    assert exc.value.attempts == 2
    assert exc.value.violations["violating_samples"] == len(dataset)
    assert log.attempts == 2
    assert len(log.rejected) == 2


def test_semi_training_accepts_feasible_network():
    dataset = _heat_dataset()
    mode = ConstraintMode.SEMI_CONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=0, output_bias=(0.0, 0.0, -0.5, 0.0, 0.0, 1.5))
    log = TrainingLog()
    params = train(mode, dataset, cfg, log)
    assert log.attempts == 1
    assert semi_violations(params, dataset)["violating_samples"] == 0


def test_train_needs_data():
    mode = ConstraintMode.UNCONSTRAINED
    with pytest.raises(InsufficientDataError):
        train(mode, [], preset_loss_config(PdeKind.HEAT, mode))


def test_full_mode_outputs_are_always_consistent():
    dataset = _heat_dataset()
    mode = ConstraintMode.FULLY_CONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=20, learning_rate=1e-4)
    params = train(mode, dataset, cfg)
    provider = NetworkCoefficientProvider(params)
    for sample in dataset:
        coeffs = provider.coefficients(sample.input_state, 0)
        assert check_consistency(coeffs)


def test_extract_constant_coefficients_rounds():
    dataset = _heat_dataset()
    mode = ConstraintMode.UNCONSTRAINED
    params = MlpParams(
        np.zeros((8, HIDDEN_WIDTH)), np.zeros(HIDDEN_WIDTH), np.zeros((HIDDEN_WIDTH, 6)), np.array(ADAMS3_RAW), mode
    )
    coeffs = extract_constant_coefficients(params, dataset, decimals=6)
    assert coeffs.alpha == (0.0, 0.0, -1.0)
    assert coeffs.beta == (0.416667, -1.333333, 1.916667)
    with pytest.raises(InsufficientDataError):
        extract_constant_coefficients(params, [], decimals=6)


def test_network_provider_uses_leading_cells():
    mode = ConstraintMode.UNCONSTRAINED
    params = _random_params(mode, np.random.default_rng(5))
    provider = NetworkCoefficientProvider(params)
    state = np.random.default_rng(6).normal(size=3 * N_CELLS)
    expected = map_outputs(mode, mlp_forward(params, state[:N_CELLS]))
    assert provider.coefficients(state, 7) == expected
    with pytest.raises(DimensionMismatchError):
        provider.coefficients(state[:N_CELLS - 1], 0)


def test_params_copy_is_independent():
    params = _random_params(ConstraintMode.UNCONSTRAINED, np.random.default_rng(0))
    clone = params.copy()
    clone.w1[0, 0] += 1.0
    assert clone.w1[0, 0] != params.w1[0, 0]


def _published_heat_dataset(lam=0.5, t_end=0.01):
    pde = PdeSpec(PdeKind.HEAT, lam=lam)
    truth = exact_series(pde, Grid1D(64, 1.0), 4, 1e-4, t_end)
    return build_training_set(truth, 1, pde)


@pytest.mark.parametrize("mode", list(ConstraintMode))
def test_initial_loss_is_small_near_adams3(mode):
    dataset = _published_heat_dataset()
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=0, seed=0)
    params = init_params(dataset[0].grid.n_cells, mode, cfg, np.random.default_rng(0))
    losses = [loss(mode, params, sample, cfg) for sample in dataset]
    assert max(losses) < 1e-5


@pytest.mark.parametrize("mode", list(ConstraintMode))
def test_training_is_deterministic_after_real_steps(mode):
    dataset = _heat_dataset()
    bias = INTERIOR_BIAS[mode]
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=50, learning_rate=1e-5, seed=4, output_bias=bias)
    first_log, second_log = TrainingLog(), TrainingLog()
    first = train(mode, dataset, cfg, first_log)
    second = train(mode, dataset, cfg, second_log)
    initial = init_params(dataset[0].grid.n_cells, mode, cfg, np.random.default_rng(4))
    assert not np.array_equal(first.w2, initial.w2)
    for a, b in zip(first.arrays(), second.arrays()):
        np.testing.assert_array_equal(a, b)
    assert [e.loss for e in first_log.entries] == [e.loss for e in second_log.entries]


def test_zero_margin_counts_as_violation():
    mode = ConstraintMode.SEMI_CONSTRAINED
    params = MlpParams(
        np.zeros((N_CELLS, HIDDEN_WIDTH)),
        np.zeros(HIDDEN_WIDTH),
        np.zeros((HIDDEN_WIDTH, 6)),
        np.array(ADAMS3_RAW),
        mode,
    )
    states = [np.sin(np.linspace(0, 6, N_CELLS)), np.zeros(N_CELLS)]
    stats = constraint_violations(params, states)
    assert stats["violating_samples"] == 2
    assert stats["worst_margin"] == 0.0


def test_full_mode_violations_use_pq_margins():
    mode = ConstraintMode.FULLY_CONSTRAINED
    arrays = (np.zeros((N_CELLS, HIDDEN_WIDTH)), np.zeros(HIDDEN_WIDTH), np.zeros((HIDDEN_WIDTH, 4)))
    state = np.ones(N_CELLS)
    inside = MlpParams(*arrays, np.array(ADAMS3_PQ), mode)
    assert constraint_violations(inside, [state])["violating_samples"] == 0
    on_edge = MlpParams(*arrays, np.array((0.0, 1.0, 0.0, 0.0)), mode)
    assert constraint_violations(on_edge, [state]) == {
        "violating_samples": 1.0, "n_samples": 1.0, "worst_margin": 0.0,
    }


@pytest.mark.parametrize("mode", [ConstraintMode.SEMI_CONSTRAINED, ConstraintMode.FULLY_CONSTRAINED])
def test_trained_constrained_schemes_stay_stable_on_unseen_inputs(mode):
    dataset = _published_heat_dataset()
    weights = (0.0, 5e-4) if mode == ConstraintMode.SEMI_CONSTRAINED else None
    cfg = preset_loss_config(PdeKind.HEAT, mode, n_steps=20, seed=2, weight_range=weights)
    params = train(mode, dataset, cfg)
    for lam in (0.1, 0.3, 0.7, 1.0):
        unseen = _published_heat_dataset(lam=lam, t_end=0.05)
        stats = constraint_violations(params, [s.input_state for s in unseen])
        assert stats["violating_samples"] == 0
        assert stats["worst_margin"] > 0


@pytest.mark.slow
def test_heat_training_smoke():
    dataset = _published_heat_dataset(t_end=1.0)
    mode = ConstraintMode.UNCONSTRAINED
    cfg = preset_loss_config(PdeKind.HEAT, mode, seed=0)
    log = TrainingLog()
    trained = train(mode, dataset, cfg, log)
    assert len(log.entries) == 8000
    assert all(np.isfinite(e.loss) for e in log.entries)
    initial = init_params(dataset[0].grid.n_cells, mode, cfg, np.random.default_rng(0))
    early = dataset[:2000]
    before = np.mean([loss(mode, initial, s, cfg) for s in early])
    after = np.mean([loss(mode, trained, s, cfg) for s in early])
    assert after <= 1.01 * before


@pytest.mark.slow
def test_wave_training_smoke():
    pde = PdeSpec(PdeKind.WAVE, c=0.5)
    truth = exact_series(pde, Grid1D(64, 1.0), 4, 1e-4, 1.0)
    dataset = build_training_set(truth, 1, pde)
    mode = ConstraintMode.SEMI_CONSTRAINED
    log = TrainingLog()
    params = train(mode, dataset, preset_loss_config(PdeKind.WAVE, mode, seed=0), log)
    assert len(log.entries) == 30000 * log.attempts
    assert semi_violations(params, dataset)["violating_samples"] == 0
    assert np.mean([e.mse for e in log.entries[-1000:]]) < 0.5 * np.mean([e.mse for e in log.entries[:1000]])
