"""
Shared pytest fixtures.
"""
from pathlib import Path

import pytest

from core.config import GausstailConfig, OracleSettings
from geometry.loader import load_geometry

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / f"{name}.json"


@pytest.fixture
def load_fixture():
    def _load(name: str):
        geometry, _ = load_geometry(FIXTURES / f"{name}.json")
        return geometry
    return _load


@pytest.fixture
def coarse_config() -> GausstailConfig:
    """Coarser oracle grids with the same eps range relative to the set size."""
    return GausstailConfig(oracle=OracleSettings(
        h_fraction_2d=2e-3, eps_min_cells_2d=10.0, eps_max_cells_2d=50.0,
        h_fraction_3d=2e-2, eps_min_cells_3d=8.0, eps_max_cells_3d=40.0,
    ))
