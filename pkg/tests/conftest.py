import math
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from parity_proxy.config import ExperimentConfig

GAINS = (0.1, 0.5, 1.0)
PHASES = tuple(np.linspace(0.0, 2 * math.pi, 12, endpoint=False))


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="function")
def small_config() -> ExperimentConfig:
    """A quick grid that still includes phi = 0."""
    return ExperimentConfig(r=0.5, steps=8, beta_mag=1.0)


@pytest.fixture(scope="function")
def out_path(tmp_path: Path) -> Iterator[Path]:
    yield tmp_path / "result.csv"
