from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from application.experiment import RunMember
from domain.coarsening import TrainingSample
from domain.entities import FieldSeries, SchemeCoefficients
from domain.learner import ConstraintMode, MlpParams, TrainingLog


class ISeriesRepository(ABC):
    @abstractmethod
    def save(self, tag: str, series: FieldSeries, fine: bool = False) -> Path:
        pass

    @abstractmethod
    def get(self, tag: str, fine: bool = False) -> FieldSeries:
        pass

    @abstractmethod
    def exists(self, tag: str, fine: bool = False) -> bool:
        pass


class ITrainingSetRepository(ABC):
    @abstractmethod
    def save(self, tag: str, samples: Sequence[TrainingSample]) -> Path:
        pass

    @abstractmethod
    def get(self, tag: str) -> List[TrainingSample]:
        pass


class ICheckpointRepository(ABC):
    @abstractmethod
    def save(self, params: MlpParams, attempts: int = 1, seed: int = 0) -> Path:
        pass

    @abstractmethod
    def get(self, mode: ConstraintMode) -> MlpParams:
        pass

    @abstractmethod
    def exists(self, mode: ConstraintMode) -> bool:
        pass

    @abstractmethod
    def save_constants(self, constants: Mapping[str, SchemeCoefficients]) -> Path:
        pass

    @abstractmethod
    def get_constants(self) -> Dict[str, SchemeCoefficients]:
        pass


class IReportRepository(ABC):
    @abstractmethod
    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        pass

    @abstractmethod
    def read_table(self, path: Path) -> List[Dict[str, str]]:
        pass

    @abstractmethod
    def find_table(self, name: str) -> Optional[List[Dict[str, str]]]:
        pass

    @abstractmethod
    def write_training_log(self, mode: ConstraintMode, log: TrainingLog) -> Path:
        pass


class IManifestRepository(ABC):
    @abstractmethod
    def save(self, experiment: str, members: Sequence[RunMember]) -> Path:
        pass

    @abstractmethod
    def get(self) -> List[RunMember]:
        pass

    @abstractmethod
    def find(self, role: str) -> List[RunMember]:
        pass

    @abstractmethod
    def get_member(self, tag: str) -> Optional[RunMember]:
        pass
