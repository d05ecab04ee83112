"""Core package for gausstail: shared models, configuration and the block scheduler."""
from .models import (
    Provenance, Basis, SteinerCoeffs2D, SteinerCoeffs3D, ExpansionTerm, ExpansionResult,
    DiagnosticCounts, MCEstimate, RunManifest,
)
from .config import ConfigError, GausstailConfig, load_config, worker_threads
from .manager import BlockScheduler
from .cli_strings import TOOL_VERSION, EXIT_OK, EXIT_INPUT_ERROR, EXIT_CONFIG_ERROR, EXIT_ACCEPTANCE_FAILURE

__all__ = [
    "Provenance", "Basis", "SteinerCoeffs2D", "SteinerCoeffs3D", "ExpansionTerm", "ExpansionResult",
    "DiagnosticCounts", "MCEstimate", "RunManifest",
    "ConfigError", "GausstailConfig", "load_config", "worker_threads",
    "BlockScheduler",
    "TOOL_VERSION", "EXIT_OK", "EXIT_INPUT_ERROR", "EXIT_CONFIG_ERROR", "EXIT_ACCEPTANCE_FAILURE",
]
