import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from application.experiment import ExperimentConfig, RunMember, member_tag
from application.repositories import (
    ICheckpointRepository,
    IManifestRepository,
    IReportRepository,
    ISeriesRepository,
    ITrainingSetRepository,
)
from domain.analysis import (
    PhaseReport,
    error_report,
    fit_slope_through_origin,
    mean_phase_displacement,
    one_step_phase_fit,
    paired_ttest,
    phase_displacement,
    summarize_samples,
)
from domain.coarsening import TrainingSample, build_training_set, cell_average_coarsen
from domain.entities import (
    FieldSeries,
    Grid1D,
    IntegratorKind,
    PdeKind,
    PdeSpec,
    RunConfig,
    SchemeCoefficients,
    validate,
)
from domain.exceptions import (
    ArtifactNotFoundError,
    DomainException,
    InsufficientDataError,
    UnsupportedPdeError,
)
from domain.integrators import adams_bashforth, exact_series, integrate_coarsened, run_simulation
from domain.learner import (
    ConstraintMode,
    MlpParams,
    NetworkCoefficientProvider,
    TrainingLog,
    constraint_violations,
    extract_constant_coefficients,
    preset_loss_config,
    train,
)
from domain.services import RecordingCoefficientProvider
from domain.spatial import initial_state, sample_forcing
from domain.stability import (
    ReducedQuadratic,
    check_consistency,
    coefficients_from_pq,
    error_constant,
    generating_polynomials,
    hurwitz_transform,
    is_hurwitz,
    root_condition_oracle,
    satisfies_root_condition_cubic,
    satisfies_root_condition_quadratic,
    truncation_order,
)

logger = logging.getLogger(__name__)

COEFFICIENT_COLUMNS = ["alpha_0", "alpha_1", "alpha_2", "beta_0", "beta_1", "beta_2"]
CONSTANTS_REPORT = "constant_coefficients"
SAMPLES_REPORT = "samples"
FEASIBILITY_REPORT = "feasibility"


def load_constants(checkpoint_repo: ICheckpointRepository) -> Dict[str, SchemeCoefficients]:
    """Constant schemes extracted at training time, keyed by mode, bit-exact."""
    return checkpoint_repo.get_constants()


def _parallel_map(fn: Callable, jobs: Sequence, n_workers: int) -> List:
    """Ordered map, in worker processes when more than one is requested."""
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------- generate

@dataclass(frozen=True)
class _GenerateJob:
    member: RunMember
    fine_grid: Grid1D
    factor: int
    dt: float
    t_end: float
    exact: bool
    keep_fine: bool
    rk_rtol: float
    rk_atol: float
    chunk_steps: int


def _generate_member(job: _GenerateJob) -> Tuple[RunMember, FieldSeries, Optional[FieldSeries], List[TrainingSample]]:
    member = job.member
    if job.exact:
        coarse = exact_series(member.pde, job.fine_grid, job.factor, job.dt, job.t_end)
        fine = None
    else:
        coarse, fine = integrate_coarsened(
            member.pde,
            job.fine_grid,
            initial_state(member.pde, job.fine_grid),
            job.t_end,
            job.dt,
            job.factor,
            chunk_steps=job.chunk_steps,
            rtol=job.rk_rtol,
            atol=job.rk_atol,
            keep_fine=job.keep_fine,
        )
    samples = build_training_set(coarse, 1, member.pde) if member.is_training else []
    return member, coarse, fine, samples


class GenerateDataUseCase:
    def __init__(
        self,
        series_repo: ISeriesRepository,
        training_repo: ITrainingSetRepository,
        manifest_repo: IManifestRepository,
        rk_rtol: float = 1e-6,
        rk_atol: float = 1e-9,
        chunk_steps: int = 2000
    ):
        self.series_repo = series_repo
        self.training_repo = training_repo
        self.manifest_repo = manifest_repo
        self.rk_rtol = rk_rtol
        self.rk_atol = rk_atol
        self.chunk_steps = chunk_steps

    @staticmethod
    def plan_members(config: ExperimentConfig) -> List[RunMember]:
        kind = config.pde.kind
        if kind != PdeKind.BURGERS:
            members = [RunMember(
                tag=member_tag("train", kind, 0, config.pde.train_value),
                role="train",
                pde=config.pde_spec(config.pde.train_value),
                parameter=config.pde.train_value,
            )]
            for i, value in enumerate(config.pde.sweep):
                members.append(RunMember(
                    tag=member_tag("test", kind, i, value),
                    role="test",
                    pde=config.pde_spec(value),
                    parameter=value,
                ))
            return members

        length = config.grid.domain_length
        members = []
        for i, seed in enumerate(config.forcing.train_seeds):
            forcing = sample_forcing(np.random.default_rng(seed), length)
            members.append(RunMember(member_tag("train", kind, i), "train", config.pde_spec(forcing=forcing)))
        rng = np.random.default_rng(config.forcing.test_seed)
        for i in range(config.forcing.test_samples):
            forcing = sample_forcing(rng, length)
            members.append(RunMember(member_tag("test", kind, i), "test", config.pde_spec(forcing=forcing)))
        return members

    def execute(self, config: ExperimentConfig, jobs: int = 1) -> List[RunMember]:
        members = self.plan_members(config)
        base = Grid1D(config.grid.fine_cells, config.grid.domain_length)
        exact_truth = config.pde.kind != PdeKind.BURGERS
        work = []
        for member in members:
            fine_grid = base if member.is_training else base.scaled(config.grid.eval_domain_scale)
            work.append(_GenerateJob(
                member=member,
                fine_grid=fine_grid,
                factor=config.grid.coarsen_factor,
                dt=config.time.dt,
                t_end=config.time.t_end if member.is_training else config.time.test_t_end,
                exact=exact_truth and not member.is_training,
                keep_fine=config.store_fine,
                rk_rtol=self.rk_rtol,
                rk_atol=self.rk_atol,
                chunk_steps=self.chunk_steps,
            ))

        for member, coarse, fine, samples in _parallel_map(_generate_member, work, jobs):
            self.series_repo.save(member.tag, coarse)
            if fine is not None:
                self.series_repo.save(member.tag, fine, fine=True)
            if samples:
                self.training_repo.save(member.tag, samples)
            logger.info(f"Generated {member.tag}: {coarse.n_levels} levels, {len(samples)} training samples")

        self.manifest_repo.save(config.name, members)
        return members


# ---------------------------------------------------------------- train

@dataclass
class TrainingOutcome:
    mode: ConstraintMode
    params: MlpParams
    log: TrainingLog
    constant: Optional[SchemeCoefficients] = None


def _loss_config(config: ExperimentConfig, mode: ConstraintMode):
    section = config.training
    return preset_loss_config(
        config.pde.kind,
        mode,
        seed=config.seed,
        epsilon=section.epsilon,
        max_retries=section.max_retries,
        n_steps=section.n_steps,
        learning_rate=section.learning_rate.get(mode),
        gamma=section.gamma.get(mode),
        weight_range=section.weight_range.get(mode),
    )


class TrainSchemesUseCase:
    def __init__(
        self,
        training_repo: ITrainingSetRepository,
        checkpoint_repo: ICheckpointRepository,
        report_repo: IReportRepository,
        manifest_repo: IManifestRepository
    ):
        self.training_repo = training_repo
        self.checkpoint_repo = checkpoint_repo
        self.report_repo = report_repo
        self.manifest_repo = manifest_repo

    def load_dataset(self) -> List[TrainingSample]:
        members = self.manifest_repo.find("train")
        if not members:
            raise ArtifactNotFoundError("Manifest lists no training members; run generate first")
        samples = []
        for member in members:
            samples.extend(self.training_repo.get(member.tag))
        # interleave members in time order
        return sorted(samples, key=lambda s: s.t_n)

    def execute(self, config: ExperimentConfig) -> Dict[ConstraintMode, TrainingOutcome]:
        dataset = self.load_dataset()
        outcomes = {}
        for mode in config.training.modes:
            cfg = _loss_config(config, mode)
            log = TrainingLog()
            logger.info(f"Training {mode.value} on {len(dataset)} samples for {cfg.n_steps} steps")
            params = train(mode, dataset, cfg, log)
            self.checkpoint_repo.save(params, attempts=log.attempts, seed=cfg.seed)
            self.report_repo.write_training_log(mode, log)
            outcome = TrainingOutcome(mode=mode, params=params, log=log)
            if mode in config.training.constant_modes:
                outcome.constant = extract_constant_coefficients(
                    params, dataset, decimals=config.training.constant_decimals
                )
            outcomes[mode] = outcome
            logger.info(f"Mode {mode.value} trained after {log.attempts} attempt(s)")

        constants = [o for o in outcomes.values() if o.constant is not None]
        if constants:
            self.checkpoint_repo.save_constants({o.mode.value: o.constant for o in constants})
            self.report_repo.write_table(
                CONSTANTS_REPORT,
                ["mode"] + COEFFICIENT_COLUMNS,
                [[o.mode.value, *o.constant.as_vector()] for o in constants],
            )
        return outcomes


# ---------------------------------------------------------------- evaluate

@dataclass(frozen=True)
class Method:
    name: str
    integrator: IntegratorKind
    adams_order: int = 3
    params: Optional[MlpParams] = None
    coefficients: Optional[SchemeCoefficients] = None

    def scheme_source(self):
        if self.params is not None:
            return NetworkCoefficientProvider(self.params)
        return self.coefficients


@dataclass(frozen=True)
class _EvaluateJob:
    member: RunMember
    truth: FieldSeries
    methods: Tuple[Method, ...]
    t_end: float
    windows: Tuple[float, ...]
    rk_rtol: float
    rk_atol: float
    startup_tolerance_factor: float


def _evaluate_member(job: _EvaluateJob) -> List[List]:
    rows = []
    truth = job.truth
    for method in job.methods:
        run = RunConfig(job.member.pde, truth.grid, truth.dt, job.t_end, method.integrator, method.adams_order)
        try:
            pred = run_simulation(
                run,
                method.scheme_source(),
                initial=truth.values[0],
                rtol=job.rk_rtol,
                atol=job.rk_atol,
                startup_tolerance_factor=job.startup_tolerance_factor,
            )
            report = error_report(pred, truth)
        except DomainException as exc:
            logger.warning(f"{method.name} failed on {job.member.tag}: {exc}")
            blanks = [None] * (2 * len(job.windows) + 4)
            rows.append([job.member.tag, job.member.parameter, method.name, "failed", *blanks])
            continue
        rows.append([
            job.member.tag,
            job.member.parameter,
            method.name,
            "ok",
            *[report.mse_until(w) for w in job.windows],
            *[report.mae_until(w) for w in job.windows],
            report.max_mse,
            report.max_mae,
            report.mse_total,
            report.mae_total,
        ])
    return rows


class EvaluateSchemesUseCase:
    def __init__(
        self,
        series_repo: ISeriesRepository,
        checkpoint_repo: ICheckpointRepository,
        report_repo: IReportRepository,
        manifest_repo: IManifestRepository,
        rk_rtol: float = 1e-6,
        rk_atol: float = 1e-9,
        startup_tolerance_factor: float = 10.0
    ):
        self.series_repo = series_repo
        self.checkpoint_repo = checkpoint_repo
        self.report_repo = report_repo
        self.manifest_repo = manifest_repo
        self.rk_rtol = rk_rtol
        self.rk_atol = rk_atol
        self.startup_tolerance_factor = startup_tolerance_factor

    def methods(self, config: ExperimentConfig) -> List[Method]:
        methods = [Method("rk", config.baselines.rk)]
        methods += [
            Method(f"adams{k}", IntegratorKind.ADAMS_BASHFORTH, adams_order=k)
            for k in config.baselines.adams_orders
        ]
        for mode in config.training.modes:
            if not self.checkpoint_repo.exists(mode):
                logger.warning(f"No checkpoint for mode {mode.value}; skipping its rows")
                continue
            methods.append(Method(mode.value, IntegratorKind.LEARNED, params=self.checkpoint_repo.get(mode)))
        for mode, coeffs in load_constants(self.checkpoint_repo).items():
            methods.append(Method(f"{mode}_const", IntegratorKind.FIXED_COEFFICIENTS, coefficients=coeffs))
        return methods

    def execute(self, config: ExperimentConfig, jobs: int = 1) -> List[Path]:
        methods = tuple(self.methods(config))
        windows = tuple(config.time.windows) or (config.time.test_t_end,)
        work = [
            _EvaluateJob(
                member=member,
                truth=self.series_repo.get(member.tag),
                methods=methods,
                t_end=config.time.test_t_end,
                windows=windows,
                rk_rtol=self.rk_rtol,
                rk_atol=self.rk_atol,
                startup_tolerance_factor=self.startup_tolerance_factor,
            )
            for member in self.manifest_repo.find("test")
        ]
        if not work:
            raise ArtifactNotFoundError("Manifest lists no test members; run generate first")
        rows = [row for member_rows in _parallel_map(_evaluate_member, work, jobs) for row in member_rows]

        header = (
            ["member", "parameter", "method", "status"]
            + [f"mse_0_{w:g}" for w in windows]
            + [f"mae_0_{w:g}" for w in windows]
            + ["max_mse", "max_mae", "mse_total", "mae_total"]
        )
        paths = [self.report_repo.write_table("errors", header, rows)]
        paths.append(self.report_repo.write_table(
            SAMPLES_REPORT,
            ["member", "method", "status", "mse", "mae"],
            [[r[0], r[2], r[3], r[-2], r[-1]] for r in rows],
        ))
        feasibility = self.write_feasibility(methods, work)
        if feasibility is not None:
            paths.append(feasibility)
        paths += self.write_coefficient_trajectories(config, methods)
        return paths

    def write_feasibility(self, methods: Iterable[Method], work: Sequence[_EvaluateJob]) -> Optional[Path]:
        """Root-condition margins of the constrained networks on every test input."""
        constrained = [
            m for m in methods if m.params is not None and m.params.mode != ConstraintMode.UNCONSTRAINED
        ]
        if not constrained:
            return None
        rows = []
        for job in work:
            for method in constrained:
                states = job.truth.values[:, :method.params.n_input]
                stats = constraint_violations(method.params, states)
                if stats["violating_samples"]:
                    logger.warning(
                        f"{method.name} leaves the stable region on {int(stats['violating_samples'])} "
                        f"of {len(states)} inputs of {job.member.tag} (worst margin {stats['worst_margin']:.3g})"
                    )
                rows.append([
                    job.member.tag,
                    method.name,
                    len(states),
                    int(stats["violating_samples"]),
                    stats["worst_margin"],
                ])
        return self.report_repo.write_table(
            FEASIBILITY_REPORT,
            ["member", "method", "n_inputs", "violating_inputs", "worst_margin"],
            rows,
        )

    def write_coefficient_trajectories(self, config: ExperimentConfig, methods: Iterable[Method]) -> List[Path]:
        learned = [m for m in methods if m.params is not None]
        train_members = self.manifest_repo.find("train")
        if not learned or not train_members:
            return []
        member = train_members[0]
        series = self.series_repo.get(member.tag)
        run = RunConfig(member.pde, series.grid, series.dt, config.time.t_end, IntegratorKind.LEARNED)
        paths = []
        for method in learned:
            recorder = RecordingCoefficientProvider(NetworkCoefficientProvider(method.params))
            try:
                run_simulation(
                    run, recorder, initial=series.values[0],
                    rtol=self.rk_rtol, atol=self.rk_atol,
                    startup_tolerance_factor=self.startup_tolerance_factor,
                )
            except DomainException as exc:
                logger.warning(f"Coefficient trajectory for {method.name} stopped early: {exc}")
            first_step = recorder.k - 1
            rows = [[first_step + i, *c.as_vector()] for i, c in enumerate(recorder.history)]
            paths.append(self.report_repo.write_table(
                f"coefficients_{method.name}", ["step"] + COEFFICIENT_COLUMNS, rows
            ))
        return paths


# ---------------------------------------------------------------- phase

@dataclass(frozen=True)
class _PhaseJob:
    pde: PdeSpec
    c: float
    grid: Grid1D
    dt: float
    t_end: float
    wavenumber: float
    v0: np.ndarray
    fixed: Tuple[Tuple[str, SchemeCoefficients], ...]
    learned: Tuple[Tuple[str, MlpParams], ...]
    rk_rtol: float
    rk_atol: float


def _phase_row(name: str, c: float, dt: float, report: PhaseReport) -> List:
    return [name, c, report.amplitude, report.displacement, report.displacement / (c * dt), report.time_averaged]


def _phase_speed(job: _PhaseJob) -> List[List]:
    """Phase rows at one wave speed, the exact displacement first."""
    c, dt = job.c, job.dt
    rows = [["exact", c, 1.0, c * dt, 1.0, False]]
    for name, coeffs in job.fixed:
        report = phase_displacement(coeffs, job.grid.dx, dt, c, job.wavenumber)
        rows.append(_phase_row(name, c, dt, report))
    for name, params in job.learned:
        recorder = RecordingCoefficientProvider(NetworkCoefficientProvider(params))
        run = RunConfig(job.pde, job.grid, dt, job.t_end, IntegratorKind.LEARNED)
        try:
            run_simulation(run, recorder, initial=job.v0, rtol=job.rk_rtol, atol=job.rk_atol)
        except DomainException as exc:
            logger.warning(f"{name} run at c={c:g} stopped early: {exc}")
        if not recorder.history:
            continue
        report = mean_phase_displacement(recorder.history, job.grid.dx, dt, c, job.wavenumber)
        rows.append(_phase_row(name, c, dt, report))
    return rows


class PhaseAnalysisUseCase:
    def __init__(
        self,
        checkpoint_repo: ICheckpointRepository,
        report_repo: IReportRepository,
        rk_rtol: float = 1e-6,
        rk_atol: float = 1e-9
    ):
        self.checkpoint_repo = checkpoint_repo
        self.report_repo = report_repo
        self.rk_rtol = rk_rtol
        self.rk_atol = rk_atol

    def execute(self, config: ExperimentConfig, jobs: int = 1) -> List[Path]:
        if config.pde.kind != PdeKind.WAVE:
            raise UnsupportedPdeError("Phase analysis applies to the wave equation only")
        fine_grid = Grid1D(config.grid.fine_cells, config.grid.domain_length)
        grid = fine_grid.coarsened(config.grid.coarsen_factor)
        dt, t_end = config.time.dt, config.time.test_t_end
        speeds = sorted(set(config.pde.sweep) | {config.pde.train_value})
        reference = config.pde_spec(speeds[0])
        wavenumber = config.phase.wavenumber or reference.initial_condition.wavenumber
        v0 = cell_average_coarsen(initial_state(reference, fine_grid), config.grid.coarsen_factor)

        fixed: Dict[str, SchemeCoefficients] = {"adams3": adams_bashforth(3)}
        for mode, coeffs in load_constants(self.checkpoint_repo).items():
            fixed[f"{mode}_const"] = coeffs
        learned: Dict[str, MlpParams] = {}
        for mode in config.training.modes:
            if not self.checkpoint_repo.exists(mode):
                logger.warning(f"No checkpoint for mode {mode.value}; skipping its phase rows")
                continue
            learned[mode.value] = self.checkpoint_repo.get(mode)

        work = [
            _PhaseJob(
                pde=config.pde_spec(c),
                c=c,
                grid=grid,
                dt=dt,
                t_end=t_end,
                wavenumber=wavenumber,
                v0=v0,
                fixed=tuple(fixed.items()),
                learned=tuple(learned.items()),
                rk_rtol=self.rk_rtol,
                rk_atol=self.rk_atol,
            )
            for c in speeds
        ]
        rows = []
        by_method: Dict[str, List[Tuple[float, float]]] = {}
        for c, speed_rows in zip(speeds, _parallel_map(_phase_speed, work, jobs)):
            for row in speed_rows:
                rows.append(row)
                by_method.setdefault(row[0], []).append((c, row[3]))
            logger.info(f"Phase displacements computed for c={c:g}")

        excluded = set(config.phase.excluded)
        slopes = []
        for name, points in by_method.items():
            kept = [(c, d) for c, d in points if c not in excluded]
            if not kept:
                continue
            cs, ds = zip(*kept)
            slopes.append([name, fit_slope_through_origin(cs, ds), len(kept)])

        return [
            self.report_repo.write_table(
                "phase",
                ["method", "c", "amplitude", "displacement", "relative_displacement", "time_averaged"],
                rows,
            ),
            self.report_repo.write_table("phase_slopes", ["method", "slope", "n_points"], slopes),
        ]


# ---------------------------------------------------------------- statistics

def _finite_or_blank(x: float) -> Optional[float]:
    return x if np.isfinite(x) else None


class PairedStatisticsUseCase:
    def __init__(self, report_repo: IReportRepository):
        self.report_repo = report_repo

    @staticmethod
    def collect(rows: Sequence[Dict[str, str]]) -> Dict[str, Dict[str, Tuple[float, float]]]:
        by_method: Dict[str, Dict[str, Tuple[float, float]]] = {}
        for row in rows:
            if row.get("status", "ok") != "ok":
                continue
            by_method.setdefault(row["method"], {})[row["member"]] = (float(row["mse"]), float(row["mae"]))
        return by_method

    def execute(self, results_path: Path, baseline: str = "rk") -> List[Path]:
        by_method = self.collect(self.report_repo.read_table(results_path))
        if baseline not in by_method:
            raise InsufficientDataError(f"Baseline method '{baseline}' has no successful samples")
        base = by_method[baseline]

        paths = []
        summary = []
        for method, samples in by_method.items():
            if method == baseline:
                continue
            members = [m for m in base if m in samples]
            if len(members) < 2:
                logger.warning(f"Skipping {method}: only {len(members)} paired samples")
                continue
            table, stats = self.compare(method, baseline, members, samples, base)
            paths.append(self.report_repo.write_table(f"ttest_{method}", table[0], table[1:]))
            summary.append(stats)
        if not summary:
            raise InsufficientDataError("No method has at least 2 samples paired with the baseline")
        paths.append(self.report_repo.write_table(
            "ttest_summary",
            ["method", "baseline", "n", "mean_mse", "baseline_mean_mse", "t_mse", "p_mse",
             "mean_mae", "baseline_mean_mae", "t_mae", "p_mae"],
            summary,
        ))
        return paths

    @staticmethod
    def compare(method, baseline, members, samples, base):
        cand_mse = [samples[m][0] for m in members]
        cand_mae = [samples[m][1] for m in members]
        base_mse = [base[m][0] for m in members]
        base_mae = [base[m][1] for m in members]
        mse = summarize_samples(cand_mse, base_mse)
        mae = summarize_samples(cand_mae, base_mae)
        t_mse = paired_ttest(cand_mse, base_mse)
        t_mae = paired_ttest(cand_mae, base_mae)

        header = ["sample", f"{method}_mse", f"{baseline}_mse", "mse_reduction_pct",
                  f"{method}_mae", f"{baseline}_mae", "mae_reduction_pct"]
        rows = [header]
        for i, m in enumerate(members):
            rows.append([m, cand_mse[i], base_mse[i], mse.reductions[i], cand_mae[i], base_mae[i], mae.reductions[i]])
        rows.append(["mean", mse.candidate_mean, mse.baseline_mean, mse.mean_reduction,
                     mae.candidate_mean, mae.baseline_mean, mae.mean_reduction])
        rows.append(["p-value", t_mse.p_value, None, None, t_mae.p_value, None, None])
        stats = [method, baseline, len(members),
                 mse.candidate_mean, mse.baseline_mean, _finite_or_blank(t_mse.statistic), t_mse.p_value,
                 mae.candidate_mean, mae.baseline_mean, _finite_or_blank(t_mae.statistic), t_mae.p_value]
        return rows, stats


# ---------------------------------------------------------------- inspection

class InspectSchemeUseCase:
    def __init__(self, consistency_tol: float = 1e-12):
        self.consistency_tol = consistency_tol

    def execute(self, coeffs: SchemeCoefficients) -> dict:
        problems = coeffs.violations()
        if problems:
            raise ValueError("; ".join(problems))
        polys = generating_polynomials(coeffs)
        order = truncation_order(coeffs)
        result = {
            "k": coeffs.k,
            "rho": list(polys.rho),
            "sigma": list(polys.sigma),
            "consistent": check_consistency(coeffs, self.consistency_tol),
            "truncation_order": order,
            "error_constant": error_constant(coeffs, order + 1) if order >= 0 else None,
            "hurwitz_polynomial": None,
            "hurwitz_stable": None,
            "routh_hurwitz": None,
            "root_condition_strict": None,
            "root_condition_lenient": None,
        }
        if coeffs.k not in (2, 3):
            return result

        psi = hurwitz_transform(coeffs.alpha)
        result["hurwitz_polynomial"] = psi.tolist()
        result["hurwitz_stable"] = is_hurwitz(psi)
        if coeffs.k == 3:
            result["routh_hurwitz"] = satisfies_root_condition_cubic(coeffs.alpha)
        else:
            a0, a1 = coeffs.alpha
            result["routh_hurwitz"] = satisfies_root_condition_quadratic(a1, a0)
        result["root_condition_strict"] = root_condition_oracle(polys.rho, strict=True)
        result["root_condition_lenient"] = root_condition_oracle(polys.rho, strict=False)
        return result


class AdamsBashforthUseCase:
    def execute(self, k: int) -> SchemeCoefficients:
        return adams_bashforth(k)


class FromPqUseCase:
    def __init__(self, consistency_tol: float = 1e-12):
        self.consistency_tol = consistency_tol

    def execute(self, p: float, q: float, beta0: float, beta1: float) -> dict:
        coeffs = coefficients_from_pq(ReducedQuadratic(p, q), (beta0, beta1))
        return {
            "coefficients": coeffs,
            "consistent": check_consistency(coeffs, self.consistency_tol),
            "root_condition": satisfies_root_condition_quadratic(p, q),
        }


class PhaseInspectionUseCase:
    def execute(
        self,
        coeffs: SchemeCoefficients,
        dx: float,
        dt: float,
        c: float,
        wavenumber: float,
        with_oracle: bool = False
    ) -> dict:
        report = phase_displacement(coeffs, dx, dt, c, wavenumber)
        result = {"report": report, "oracle": None}
        if with_oracle:
            result["oracle"] = one_step_phase_fit(coeffs, dx, dt, c, wavenumber)
        return result


class PairedTTestUseCase:
    def execute(self, xs: Sequence[float], ys: Sequence[float]) -> dict:
        test = paired_ttest(xs, ys)
        summary = summarize_samples(xs, ys)
        return {
            "t_statistic": _finite_or_blank(test.statistic),
            "p_value": test.p_value,
            "mean_x": summary.candidate_mean,
            "mean_y": summary.baseline_mean,
            "reductions": summary.reductions.tolist(),
        }


class ValidateRunUseCase:
    def execute(self, config: RunConfig) -> List[str]:
        return validate(config)
