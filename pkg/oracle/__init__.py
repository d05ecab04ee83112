"""Grid tube-volume oracle."""
from .grid import (
    GridField, SteinerFit, IntersectionConstant, OracleError, MixedOrderWarning,
    distance_field, shared_distance_fields, tube_volume, default_spacing, default_eps_grid,
    fit_steiner, oracle_fit, intersection_tube_volume, intersection_volumes, estimate_intersection_constant, dump_field,
)

__all__ = [
    "GridField", "SteinerFit", "IntersectionConstant", "OracleError", "MixedOrderWarning",
    "distance_field", "shared_distance_fields", "tube_volume", "default_spacing", "default_eps_grid",
    "fit_steiner", "oracle_fit", "intersection_tube_volume", "intersection_volumes", "estimate_intersection_constant",
    "dump_field",
]
