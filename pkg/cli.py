"""Experiment pipeline: generate -> train -> evaluate -> phase / ttest."""
import functools
import logging
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from config import configure_logging, settings
from application.experiment import ExperimentConfig
from application.use_cases import (
    SAMPLES_REPORT,
    EvaluateSchemesUseCase,
    GenerateDataUseCase,
    PairedStatisticsUseCase,
    PhaseAnalysisUseCase,
    TrainSchemesUseCase,
)
from domain.exceptions import DomainException
from infrastructure.repositories import (
    FileCheckpointRepository,
    FileManifestRepository,
    FileReportRepository,
    FileSeriesRepository,
    FileTrainingSetRepository,
)
from infrastructure.storage import RunStorage

logger = logging.getLogger(__name__)


def _load_config(path: str, seed: Optional[int]) -> ExperimentConfig:
    try:
        config = ExperimentConfig.load(Path(path))
    except ValidationError as e:
        raise click.UsageError(f"Invalid experiment config {path}:\n{e}")
    except ValueError as e:
        raise click.UsageError(f"Unreadable experiment config {path}: {e}")
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    return config


def _storage(out: str) -> RunStorage:
    return RunStorage(out).init()


def domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainException as e:
            logger.warning(f"{fn.__name__} failed: {e}")
            raise click.ClickException(str(e))
    return wrapper


def experiment_options(fn):
    fn = click.option("--jobs", type=click.IntRange(min=1), default=settings.jobs, show_default=True,
                      help="Worker processes for sweep members.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option("--out", type=click.Path(file_okay=False), default=settings.output_dir,
                      show_default=True, help="Run directory.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                      required=True, help="Experiment JSON document.")(fn)
    return fn


@click.group()
@click.option("--debug", is_flag=True, default=settings.debug, help="Verbose logging.")
def cli(debug: bool):
    """Learned linear multistep schemes on coarse grids."""
    configure_logging(debug)


@cli.command()
@experiment_options
@domain_errors
def generate(config_path: str, out: str, seed: Optional[int], jobs: int):
    """Fine-grid reference runs, coarsened truth and training sets."""
    config = _load_config(config_path, seed)
    storage = _storage(out)
    use_case = GenerateDataUseCase(
        FileSeriesRepository(storage),
        FileTrainingSetRepository(storage),
        FileManifestRepository(storage),
        rk_rtol=settings.rk_rtol,
        rk_atol=settings.rk_atol,
        chunk_steps=settings.truth_chunk_steps,
    )
    members = use_case.execute(config, jobs=jobs)
    click.echo(f"Generated {len(members)} members in {storage.root}")


@cli.command(name="train")
@experiment_options
@click.option("--steps", type=click.IntRange(min=0), default=None, help="Override the training step count.")
@domain_errors
def train_command(config_path: str, out: str, seed: Optional[int], jobs: int, steps: Optional[int]):
    """Train one coefficient network per constraint mode."""
    config = _load_config(config_path, seed)
    if steps is not None:
        config.training.n_steps = steps
    storage = _storage(out)
    use_case = TrainSchemesUseCase(
        FileTrainingSetRepository(storage),
        FileCheckpointRepository(storage),
        FileReportRepository(storage),
        FileManifestRepository(storage),
    )
    outcomes = use_case.execute(config)
    for mode, outcome in outcomes.items():
        click.echo(f"{mode.value}: {outcome.log.attempts} attempt(s)")


@cli.command()
@experiment_options
@domain_errors
def evaluate(config_path: str, out: str, seed: Optional[int], jobs: int):
    """Coarse-grid runs of every method against the stored truth."""
    config = _load_config(config_path, seed)
    storage = _storage(out)
    use_case = EvaluateSchemesUseCase(
        FileSeriesRepository(storage),
        FileCheckpointRepository(storage),
        FileReportRepository(storage),
        FileManifestRepository(storage),
        rk_rtol=settings.rk_rtol,
        rk_atol=settings.rk_atol,
        startup_tolerance_factor=settings.startup_tolerance_factor,
    )
    for path in use_case.execute(config, jobs=jobs):
        click.echo(str(path))


@cli.command()
@experiment_options
@domain_errors
def phase(config_path: str, out: str, seed: Optional[int], jobs: int):
    """Mean phase displacement per method and wave speed."""
    config = _load_config(config_path, seed)
    storage = _storage(out)
    use_case = PhaseAnalysisUseCase(
        FileCheckpointRepository(storage),
        FileReportRepository(storage),
        rk_rtol=settings.rk_rtol,
        rk_atol=settings.rk_atol,
    )
    for path in use_case.execute(config, jobs=jobs):
        click.echo(str(path))


@cli.command()
@click.option("--results", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Per-sample error table; defaults to <out>/reports/samples.csv.")
@click.option("--out", type=click.Path(file_okay=False), default=settings.output_dir, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Experiment JSON document; supplies the statistics baseline.")
@click.option("--baseline", default=None, help="Method every candidate is paired with [default: rk].")
@domain_errors
def ttest(results: Optional[str], out: str, config_path: Optional[str], baseline: Optional[str]):
    """Paired t-tests of every method against the baseline."""
    if baseline is None:
        baseline = _load_config(config_path, None).statistics.baseline if config_path else "rk"
    storage = _storage(out)
    path = Path(results) if results else storage.report_path(SAMPLES_REPORT)
    use_case = PairedStatisticsUseCase(FileReportRepository(storage))
    for written in use_case.execute(path, baseline=baseline):
        click.echo(str(written))


if __name__ == "__main__":
    cli()
