"""RK and Adams-Bashforth baseline tables for the heat and wave presets, no training."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import click

from config import settings
from application.experiment import ExperimentConfig
from application.use_cases import EvaluateSchemesUseCase, GenerateDataUseCase
from infrastructure.repositories import (
    FileCheckpointRepository,
    FileManifestRepository,
    FileReportRepository,
    FileSeriesRepository,
    FileTrainingSetRepository,
)
from infrastructure.storage import RunStorage

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@click.command()
@click.option("--out", type=click.Path(file_okay=False), default="runs/baselines", show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=settings.jobs, show_default=True)
@click.argument("presets", nargs=-1)
def main(out: str, jobs: int, presets):
    for name in presets or ("heat", "wave"):
        config = ExperimentConfig.load(CONFIG_DIR / f"{name}.json")
        config.training.modes = []
        config.training.constant_modes = []
        storage = RunStorage(Path(out) / name).init()
        GenerateDataUseCase(
            FileSeriesRepository(storage),
            FileTrainingSetRepository(storage),
            FileManifestRepository(storage),
            rk_rtol=settings.rk_rtol,
            rk_atol=settings.rk_atol,
            chunk_steps=settings.truth_chunk_steps,
        ).execute(config, jobs=jobs)
        paths = EvaluateSchemesUseCase(
            FileSeriesRepository(storage),
            FileCheckpointRepository(storage),
            FileReportRepository(storage),
            FileManifestRepository(storage),
            rk_rtol=settings.rk_rtol,
            rk_atol=settings.rk_atol,
            startup_tolerance_factor=settings.startup_tolerance_factor,
        ).execute(config, jobs=jobs)
        click.echo(f"{name}: {paths[0]}")


if __name__ == "__main__":
    main()
