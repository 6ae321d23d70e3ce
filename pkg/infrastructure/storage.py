import logging
from pathlib import Path
from typing import Union

logger = logging.getLogger(__name__)

SUBDIRECTORIES = ("series", "training", "checkpoints", "logs", "reports")


class RunStorage:
    """Directory layout of one experiment run."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def init(self) -> "RunStorage":
        for name in SUBDIRECTORIES:
            (self.root / name).mkdir(parents=True, exist_ok=True)
        logger.debug(f"Run directory ready at {self.root}")
        return self

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def series_path(self, tag: str, fine: bool = False) -> Path:
        suffix = "_fine" if fine else ""
        return self.root / "series" / f"{tag}{suffix}.json"

    def training_path(self, tag: str) -> Path:
        return self.root / "training" / f"{tag}.jsonl"

    def checkpoint_path(self, mode: str) -> Path:
        return self.root / "checkpoints" / f"{mode}.json"

    def constants_path(self) -> Path:
        return self.root / "checkpoints" / "constants.json"

    def training_log_path(self, mode: str) -> Path:
        return self.root / "logs" / f"{mode}_training.csv"

    def report_path(self, name: str) -> Path:
        return self.root / "reports" / f"{name}.csv"
