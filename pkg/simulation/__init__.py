"""Random-wave field simulation and Monte Carlo exceedance estimates."""
from .field import (
    DEFAULT_WAVES, SimulationError, DomainSizeError, RandomWaveField, wave_vectors, replicate_generator,
    draw_coefficients, design_matrices, make_field, covariance, evaluate,
)
from .diagnostics import ExcursionDiagnostics, sandwich_radii, excursion_diagnostics
from .montecarlo import (
    RefinementRow, discretize, replicate_maxima, estimate_exceedance, estimate_joint_exceedance,
    refinement_check,
)

__all__ = [
    "DEFAULT_WAVES", "SimulationError", "DomainSizeError", "RandomWaveField", "wave_vectors",
    "replicate_generator", "draw_coefficients", "design_matrices", "make_field", "covariance", "evaluate",
    "ExcursionDiagnostics", "sandwich_radii", "excursion_diagnostics",
    "RefinementRow", "discretize", "replicate_maxima", "estimate_exceedance", "estimate_joint_exceedance",
    "refinement_check",
]
