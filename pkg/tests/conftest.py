import pytest
import numpy as np
from pathlib import Path

from domain.entities import Grid1D, PdeKind, PdeSpec
from domain.integrators import adams_bashforth
from domain.spatial import sample_forcing
from infrastructure.storage import RunStorage


DATA_DIR = Path(__file__).parent / "data"
CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def coarse_grid():
    return Grid1D(16, 1.0)


@pytest.fixture
def fine_grid():
    return Grid1D(64, 1.0)


@pytest.fixture
def heat_pde():
    return PdeSpec(PdeKind.HEAT, lam=0.5)


@pytest.fixture
def wave_pde():
    return PdeSpec(PdeKind.WAVE, c=0.5)


@pytest.fixture
def burgers_pde():
    forcing = sample_forcing(np.random.default_rng(0), 2.0 * np.pi)
    return PdeSpec(PdeKind.BURGERS, eta=0.01, forcing=forcing)


@pytest.fixture
def adams3():
    return adams_bashforth(3)


@pytest.fixture
def run_storage(tmp_path):
    return RunStorage(tmp_path / "run").init()


@pytest.fixture
def tiny_heat_config():
    """A heat experiment small enough to generate, train and evaluate in seconds."""
    return {
        "name": "tiny-heat",
        "pde": {"kind": "heat", "train_value": 0.5, "sweep": [0.3, 0.7]},
        "grid": {"fine_cells": 16, "domain_length": 1.0, "coarsen_factor": 4},
        "time": {"dt": 1e-3, "t_end": 0.02, "windows": [0.01, 0.02]},
        "training": {
            "modes": ["un", "semi", "full"],
            "n_steps": 5,
            "weight_range": {"semi": [0.0, 5e-4]},
        },
        "baselines": {"adams_orders": [3, 4]},
    }


@pytest.fixture
def tiny_wave_config():
    return {
        "name": "tiny-wave",
        "pde": {"kind": "wave", "train_value": 0.5, "sweep": [0.2, 0.5, 1.0]},
        "grid": {"fine_cells": 64, "domain_length": 1.0, "coarsen_factor": 4},
        "time": {"dt": 1e-3, "t_end": 0.01, "windows": [0.01]},
        "training": {"modes": ["semi"], "n_steps": 3, "learning_rate": {"semi": 1e-7}},
        "phase": {"excluded": [0.5]},
    }
