"""
Configuration for gausstail: grid resolutions, simulation defaults and
acceptance tolerances, all with documented defaults.
"""
import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from core.cli_strings import THREADS_ENV_VAR


logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Exception raised when a configuration file or value is invalid."""
    pass


class OracleSettings(BaseModel):
    """Tube-volume oracle resolution."""
    # grid spacing as a fraction of the bounding-box diagonal
    h_fraction_2d: float = Field(default=5e-4, gt=0.0)
    h_fraction_3d: float = Field(default=1e-2, gt=0.0)
    # epsilon range in units of h
    eps_min_cells_2d: float = Field(default=20.0, gt=0.0)
    eps_max_cells_2d: float = Field(default=200.0, gt=0.0)
    eps_min_cells_3d: float = Field(default=5.0, gt=0.0)
    eps_max_cells_3d: float = Field(default=30.0, gt=0.0)
    eps_count: int = Field(default=10, ge=8)
    min_eps_span: float = Field(default=4.0, gt=1.0)
    max_cells: int = Field(default=50_000_000, gt=0)
    # relative spread of volume/eps^p tolerated before a mixed-order warning
    power_law_tolerance: float = Field(default=0.05, gt=0.0)


class SimulationSettings(BaseModel):
    """Random-wave field and Monte Carlo defaults."""
    waves: int = Field(default=66, ge=5)
    h_curve: float = Field(default=0.005, gt=0.0)
    h_interior: float = Field(default=0.01, gt=0.0)
    max_domain_diameter: float = Field(default=4.0, gt=0.0)
    block_size: int = Field(default=4096, gt=0)
    diagnostics_cap: int = Field(default=200, ge=0)
    refinement_fraction: float = Field(default=0.1, gt=0.0, le=1.0)
    threads: Optional[int] = Field(default=None, ge=1)


class DiagnosticSettings(BaseModel):
    """Parameters of the excursion-set diagnostics."""
    alpha: float = Field(default=0.4, gt=0.0, lt=1.0)
    beta: float = Field(default=0.4, gt=0.0)
    directions: int = Field(default=16, ge=4)
    grid_h: float = Field(default=0.02, gt=0.0)

    @model_validator(mode="after")
    def _check_beta(self) -> "DiagnosticSettings":
        if self.beta <= (1.0 - self.alpha) / 2.0:
            raise ValueError(f"beta={self.beta} must exceed (1 - alpha)/2 = {(1.0 - self.alpha) / 2.0}")
        return self


class AcceptanceSettings(BaseModel):
    """Tolerances used by `gausstail examples`."""
    exact_rel: float = 1e-12
    sigma2_rel: float = 5e-3
    sigma2_abs: float = 1e-3
    L1_rel: float = 2e-2
    L0_abs: float = 5e-2
    polytope_rel: float = 3e-2
    tangent_rel: float = 2e-2
    intersection_rel: float = 3e-2


class GausstailConfig(BaseModel):
    """Top-level configuration; an empty document yields all defaults."""
    oracle: OracleSettings = Field(default_factory=OracleSettings)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    diagnostics: DiagnosticSettings = Field(default_factory=DiagnosticSettings)
    acceptance: AcceptanceSettings = Field(default_factory=AcceptanceSettings)


def load_config(path: Optional[Path] = None) -> GausstailConfig:
    """
    Load configuration from a JSON file, or return the defaults.

    Args:
        path: Optional path to a JSON configuration document

    Returns:
        The validated configuration

    Raises:
        ConfigError: If the file cannot be read or fails validation
    """
    if path is None:
        return GausstailConfig()

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e

    try:
        config = GausstailConfig.model_validate_json(text or "{}")
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e

    logger.debug(f"Loaded configuration from {path}")
    return config


def worker_threads(config: Optional[GausstailConfig] = None) -> int:
    """
    Number of worker threads to use.

    The GAUSSTAIL_THREADS environment variable caps the count; it only
    changes speed, never results.
    """
    configured = config.simulation.threads if config is not None else None
    count = configured or os.cpu_count() or 1

    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            cap = int(raw)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from e
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV_VAR} must be positive, got {cap}")
        count = min(count, cap)

    return max(1, count)
