from pathlib import Path

import numpy as np
import pytest

from tumor_phasefield.manager import SimulationManager
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.contexts import RunContext
from tumor_phasefield.schemas.grid import Grid2D
from tumor_phasefield.schemas.sources import CustomSource, ShrunkenSimplex


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def small_grid() -> Grid2D:
    return Grid2D(nx=16, ny=16)


@pytest.fixture
def small_config(small_grid: Grid2D) -> SimConfig:
    """Default sources and region on a coarse grid, ten steps."""
    return SimConfig(grid=small_grid, t_final=0.01, output_every=5)


@pytest.fixture
def quiet_config(small_grid: Grid2D) -> SimConfig:
    """Sigma = 0 and M = 0, so the phases only move by Cahn-Hilliard dynamics."""
    return SimConfig(
        grid=small_grid,
        t_final=0.01,
        output_every=5,
        source=CustomSource(),
        region=ShrunkenSimplex(),
    )


@pytest.fixture
def run_ctx(tmp_path: Path) -> RunContext:
    """Provides a run context writing under a temporary directory."""
    return RunContext(base_dir=tmp_path / "runs")


@pytest.fixture
def manager(run_ctx: RunContext) -> SimulationManager:
    """Provides the `SimulationManager` instance."""
    return SimulationManager(run_ctx)
