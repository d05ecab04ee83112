"""Geometry package: planar sets, polytopes and their Steiner coefficients."""
from .planar import (
    Edge, EdgeKind, Component, ComponentKind, IrregularKind, IrregularPoint, PlanarSet, GeometryError,
    validate_set, euler_characteristic, outer_minkowski_content, concavity_correction, concave_summand,
    interior_area, signed_area, turning_total, steiner_coefficients_2d, glue_coefficients, intersection_tube_constants,
    tube_constants, tangent_pair_intersection_area, split_at_concave_vertex, glued_coefficients,
)
from .polytope import (
    PolytopeEdge, PolytopeSummary, Box, BoxUnion, box_union, polytope_coefficients, dihedral_subtraction_constant,
)
from .loader import Geometry, parse_geometry, load_geometry

__all__ = [
    "Edge", "EdgeKind", "Component", "ComponentKind", "IrregularKind", "IrregularPoint", "PlanarSet",
    "GeometryError", "validate_set", "euler_characteristic", "outer_minkowski_content",
    "concavity_correction", "concave_summand", "interior_area", "signed_area", "turning_total",
    "steiner_coefficients_2d", "glue_coefficients", "intersection_tube_constants", "tube_constants",
    "tangent_pair_intersection_area", "split_at_concave_vertex", "glued_coefficients",
    "PolytopeEdge", "PolytopeSummary", "Box", "BoxUnion", "box_union", "polytope_coefficients",
    "dihedral_subtraction_constant",
    "Geometry", "parse_geometry", "load_geometry",
]
