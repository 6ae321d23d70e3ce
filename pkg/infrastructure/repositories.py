import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from application.experiment import RunMember
from application.repositories import (
    ICheckpointRepository,
    IManifestRepository,
    IReportRepository,
    ISeriesRepository,
    ITrainingSetRepository,
)
from domain.coarsening import TrainingSample
from domain.entities import FieldSeries, SchemeCoefficients
from domain.exceptions import ArtifactNotFoundError, InsufficientDataError, NonFiniteValueError
from domain.learner import ConstraintMode, MlpParams, TrainingLog
from infrastructure.models import (
    CheckpointDocument,
    ConstantsDocument,
    GridDocument,
    ManifestDocument,
    MemberDocument,
    PdeDocument,
    SeriesDocument,
    TrainingHeaderDocument,
    TrainingSampleDocument,
)
from infrastructure.storage import RunStorage

logger = logging.getLogger(__name__)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise NonFiniteValueError(f"Refusing to write non-finite value {value}")
        return f"{float(value):.10g}"
    return str(value)


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise ArtifactNotFoundError(f"{what} not found at {path}")
    return path


def export_series_csv(series: FieldSeries, path: Path) -> Path:
    """Write a series as CSV: one row per time level, header t, cell_0, ..."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"cell_{j}" for j in range(series.grid.n_cells)])
        for t, row in zip(series.times, series.values):
            writer.writerow([format_cell(t)] + [format_cell(v) for v in row])
    return path


class FileSeriesRepository(ISeriesRepository):
    def __init__(self, storage: RunStorage):
        self.storage = storage

    def save(self, tag: str, series: FieldSeries, fine: bool = False) -> Path:
        path = self.storage.series_path(tag, fine)
        path.write_text(SeriesDocument.from_domain(series).model_dump_json(), encoding="utf-8")
        return path

    def get(self, tag: str, fine: bool = False) -> FieldSeries:
        path = _require(self.storage.series_path(tag, fine), f"Series '{tag}'")
        return SeriesDocument.model_validate_json(path.read_text(encoding="utf-8")).to_domain()

    def exists(self, tag: str, fine: bool = False) -> bool:
        return self.storage.series_path(tag, fine).exists()


class FileTrainingSetRepository(ITrainingSetRepository):
    """One header line, then one sample per line."""

    def __init__(self, storage: RunStorage):
        self.storage = storage

    def save(self, tag: str, samples: Sequence[TrainingSample]) -> Path:
        if not samples:
            raise InsufficientDataError(f"Training set '{tag}' is empty")
        first = samples[0]
        header = TrainingHeaderDocument(
            pde=PdeDocument.from_domain(first.pde),
            grid=GridDocument.from_domain(first.grid),
            dt=first.dt,
            n_samples=len(samples),
        )
        path = self.storage.training_path(tag)
        with path.open("w", encoding="utf-8") as fh:
            fh.write(header.model_dump_json(by_alias=True) + "\n")
            for sample in samples:
                fh.write(TrainingSampleDocument.from_domain(sample).model_dump_json() + "\n")
        return path

    def get(self, tag: str) -> List[TrainingSample]:
        path = _require(self.storage.training_path(tag), f"Training set '{tag}'")
        with path.open(encoding="utf-8") as fh:
            header = TrainingHeaderDocument.model_validate_json(fh.readline())
            pde, grid = header.pde.to_domain(), header.grid.to_domain()
            samples = [
                TrainingSampleDocument.model_validate_json(line).to_domain(pde, grid, header.dt)
                for line in fh
                if line.strip()
            ]
        if len(samples) != header.n_samples:
            raise InsufficientDataError(
                f"Training set '{tag}' is truncated: {len(samples)} of {header.n_samples} samples"
            )
        return samples


class FileCheckpointRepository(ICheckpointRepository):
    def __init__(self, storage: RunStorage):
        self.storage = storage

    def save(self, params: MlpParams, attempts: int = 1, seed: int = 0) -> Path:
        path = self.storage.checkpoint_path(params.mode.value)
        doc = CheckpointDocument.from_domain(params, attempts=attempts, seed=seed)
        path.write_text(doc.model_dump_json(indent=2), encoding="utf-8")
        return path

    def get(self, mode: ConstraintMode) -> MlpParams:
        path = _require(self.storage.checkpoint_path(mode.value), f"Checkpoint for mode '{mode.value}'")
        return CheckpointDocument.model_validate_json(path.read_text(encoding="utf-8")).to_domain()

    def exists(self, mode: ConstraintMode) -> bool:
        return self.storage.checkpoint_path(mode.value).exists()

    def save_constants(self, constants: Mapping[str, SchemeCoefficients]) -> Path:
        path = self.storage.constants_path()
        path.write_text(ConstantsDocument.from_domain(constants).model_dump_json(indent=2), encoding="utf-8")
        return path

    def get_constants(self) -> Dict[str, SchemeCoefficients]:
        path = self.storage.constants_path()
        if not path.exists():
            return {}
        return ConstantsDocument.model_validate_json(path.read_text(encoding="utf-8")).to_domain()


class FileReportRepository(IReportRepository):
    def __init__(self, storage: RunStorage):
        self.storage = storage

    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        path = self.storage.report_path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
        logger.info(f"Wrote {len(rows)} rows to {path}")
        return path

    def read_table(self, path: Path) -> List[Dict[str, str]]:
        path = _require(Path(path), "Table")
        with path.open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))

    def find_table(self, name: str) -> Optional[List[Dict[str, str]]]:
        path = self.storage.report_path(name)
        return self.read_table(path) if path.exists() else None

    def write_training_log(self, mode: ConstraintMode, log: TrainingLog) -> Path:
        path = self.storage.training_log_path(mode.value)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["attempt", "step", "mse", "barrier", "loss"])
            for e in log.entries:
                writer.writerow([e.attempt, e.step, format_cell(e.mse), format_cell(e.barrier), format_cell(e.loss)])
        return path


class FileManifestRepository(IManifestRepository):
    def __init__(self, storage: RunStorage):
        self.storage = storage

    def save(self, experiment: str, members: Sequence[RunMember]) -> Path:
        doc = ManifestDocument(
            experiment=experiment,
            members=[MemberDocument.from_domain(m) for m in members],
        )
        path = self.storage.manifest_path
        path.write_text(doc.model_dump_json(indent=2, by_alias=True), encoding="utf-8")
        return path

    def get(self) -> List[RunMember]:
        path = _require(self.storage.manifest_path, "Run manifest")
        doc = ManifestDocument.model_validate_json(path.read_text(encoding="utf-8"))
        return [m.to_domain() for m in doc.members]

    def find(self, role: str) -> List[RunMember]:
        return [m for m in self.get() if m.role == role]

    def get_member(self, tag: str) -> Optional[RunMember]:
        return next((m for m in self.get() if m.tag == tag), None)
