"""
Geometry loading from JSON documents.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from pydantic import ValidationError

from geometry.planar import GeometryError, PlanarSet, validate_set
from geometry.polytope import Box, BoxUnion, PolytopeSummary, box_union


logger = logging.getLogger(__name__)

Geometry = Union[PlanarSet, BoxUnion, PolytopeSummary]


def parse_geometry(raw: Dict[str, Any]) -> Geometry:
    """
    Build a geometry from a parsed JSON document.

    Planar documents become a PlanarSet. Three-dimensional documents become
    a BoxUnion ({"boxes": [...]}) or an explicit PolytopeSummary
    ({"volume", "surface_area", "edges"}).
    """
    if not isinstance(raw, dict):
        raise GeometryError("geometry must be a JSON object")
    dimension = raw.get("dimension", 2)
    if dimension == 2:
        return validate_set(raw)
    if dimension != 3:
        raise GeometryError(f"unsupported dimension {dimension!r}")

    try:
        if "boxes" in raw:
            union = BoxUnion(boxes=[Box.model_validate(b) for b in raw["boxes"]])
            box_union(union)
            return union
        edges = [{"length": e.get("length"), "dihedral": e.get("dihedral")} for e in raw.get("edges", [])]
        return PolytopeSummary(volume=raw.get("volume"), surface_area=raw.get("surface_area"), edges=edges)
    except ValidationError as e:
        message = e.errors()[0].get("msg", str(e))
        raise GeometryError(f"invalid polytope: {message}") from e
    except (TypeError, AttributeError) as e:
        raise GeometryError(f"invalid polytope: {e}") from e


def load_geometry(path: Union[str, Path]) -> Tuple[Geometry, str]:
    """
    Read and validate a geometry file.

    Returns:
        Tuple (geometry, sha256 of the file bytes)

    Raises:
        GeometryError: If the file is unreadable, not JSON or not a valid geometry
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise GeometryError(f"cannot read geometry {path}: {e}") from e
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise GeometryError(f"{path} is not valid JSON: {e}") from e

    geometry = parse_geometry(raw)
    logger.debug(f"Loaded {type(geometry).__name__} from {path}")
    return geometry, hashlib.sha256(data).hexdigest()
