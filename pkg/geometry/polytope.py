"""
Polytopes in three dimensions: edge bookkeeping and Steiner-type coefficients.

A polytope is summarized by its volume, surface area and edges with their
internal dihedral angles. Unions of axis-aligned boxes are converted into
such a summary exactly.
"""
import logging
import math
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from core.models import Provenance, SteinerCoeffs3D
from geometry.planar import GeometryError


logger = logging.getLogger(__name__)

TOLERANCE = 1e-9

Point3 = Tuple[float, float, float]


class PolytopeEdge(BaseModel):
    """An edge of length `length` whose faces meet at internal angle `dihedral`."""
    model_config = ConfigDict(frozen=True)

    length: float = Field(gt=0.0)
    dihedral: float = Field(gt=0.0, lt=2.0 * math.pi)
    start: Optional[Point3] = None
    end: Optional[Point3] = None

    @property
    def convex(self) -> bool:
        return self.dihedral <= math.pi


class PolytopeSummary(BaseModel):
    """Volume, surface area and edges of a polytope."""
    model_config = ConfigDict(frozen=True)

    volume: float = Field(ge=0.0)
    surface_area: float = Field(ge=0.0)
    edges: List[PolytopeEdge] = Field(default_factory=list)
    # (sum of box volumes, sum of box areas - 2 * contact areas) for box unions
    inclusion_exclusion: Optional[Tuple[float, float]] = None

    def convex_edges(self) -> List[PolytopeEdge]:
        return [e for e in self.edges if e.convex]

    def concave_edges(self) -> List[PolytopeEdge]:
        return [e for e in self.edges if not e.convex]


class Box(BaseModel):
    """Axis-aligned box [min, max]."""
    model_config = ConfigDict(frozen=True)

    min: Point3
    max: Point3

    @model_validator(mode="after")
    def _check_extent(self) -> "Box":
        if not all(math.isfinite(c) for c in (*self.min, *self.max)):
            raise ValueError("box corners must be finite")
        if not all(hi - lo > TOLERANCE for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"box {self.min}..{self.max} has no interior")
        return self

    @property
    def widths(self) -> Tuple[float, float, float]:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    @property
    def volume(self) -> float:
        a, b, c = self.widths
        return a * b * c

    @property
    def surface_area(self) -> float:
        a, b, c = self.widths
        return 2.0 * (a * b + b * c + a * c)

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Exact Euclidean distance from points (last axis 3) to the box, 0 inside."""
        points = np.asarray(points, dtype=float)
        gap = np.maximum(np.maximum(np.asarray(self.min) - points, points - np.asarray(self.max)), 0.0)
        return np.sqrt(np.sum(gap * gap, axis=-1))


class BoxUnion(BaseModel):
    """A union of boxes with pairwise disjoint interiors."""
    model_config = ConfigDict(frozen=True)

    boxes: List[Box] = Field(min_length=1)

    def bounds(self) -> Tuple[Point3, Point3]:
        lo = np.min([box.min for box in self.boxes], axis=0)
        hi = np.max([box.max for box in self.boxes], axis=0)
        return tuple(map(float, lo)), tuple(map(float, hi))

    @property
    def diameter(self) -> float:
        lo, hi = self.bounds()
        return math.dist(lo, hi)

    def distance(self, points: np.ndarray) -> np.ndarray:
        result = self.boxes[0].distance(points)
        for box in self.boxes[1:]:
            np.minimum(result, box.distance(points), out=result)
        return result


def _manifold_vertex_table() -> np.ndarray:
    """For each 2x2x2 occupancy pattern, whether the union is a manifold at the shared corner."""
    table = np.zeros(256, dtype=bool)
    for code in range(256):
        cube = np.array([(code >> (7 - s)) & 1 for s in range(8)], dtype=bool).reshape(2, 2, 2)
        table[code] = ndimage.label(cube)[1] <= 1 and ndimage.label(~cube)[1] <= 1
    return table


_MANIFOLD_VERTEX = _manifold_vertex_table()


def _pairwise_contacts(boxes: Sequence[Box]) -> float:
    """Check pairwise interiors and return the total face-contact area."""
    contact = 0.0
    for (i, a), (j, b) in combinations(enumerate(boxes), 2):
        overlap = [min(a.max[k], b.max[k]) - max(a.min[k], b.min[k]) for k in range(3)]
        if any(w < -TOLERANCE for w in overlap):
            continue
        if all(w > TOLERANCE for w in overlap):
            raise GeometryError(f"boxes {i} and {j} have overlapping interiors")
        flat = [k for k in range(3) if abs(overlap[k]) <= TOLERANCE]
        if len(flat) == 1:
            others = [overlap[k] for k in range(3) if k != flat[0]]
            contact += others[0] * others[1]
    return contact


def box_union(boxes: Union[BoxUnion, Sequence[Box]]) -> PolytopeSummary:
    """
    Summarize a union of boxes with disjoint interiors.

    Cells of the coordinate-compressed grid are either fully inside or fully
    outside the union, so volume, area and edges follow from occupancy
    patterns: one occupied cell around a grid line gives a convex edge
    (pi/2), three give a concave edge (3*pi/2). Collinear runs of the same
    kind are merged into one edge.

    Raises:
        GeometryError: If interiors overlap or boxes touch only along an
            edge or at a corner
    """
    boxes = list(boxes.boxes if isinstance(boxes, BoxUnion) else boxes)
    if not boxes:
        raise GeometryError("box union needs at least one box")
    contact = _pairwise_contacts(boxes)

    axes = [np.unique(np.concatenate([[b.min[k] for b in boxes], [b.max[k] for b in boxes]])) for k in range(3)]
    widths = [np.diff(coords) for coords in axes]
    shape = tuple(len(w) for w in widths)

    # occupancy padded with one empty layer on every side
    occupied = np.zeros(tuple(n + 2 for n in shape), dtype=np.int8)
    for box in boxes:
        lo = [int(np.searchsorted(axes[k], box.min[k])) for k in range(3)]
        hi = [int(np.searchsorted(axes[k], box.max[k])) for k in range(3)]
        occupied[lo[0] + 1:hi[0] + 1, lo[1] + 1:hi[1] + 1, lo[2] + 1:hi[2] + 1] = 1

    cell_volume = widths[0][:, None, None] * widths[1][None, :, None] * widths[2][None, None, :]
    volume = float(np.sum(occupied[1:-1, 1:-1, 1:-1] * cell_volume))

    area = 0.0
    for axis in range(3):
        changes = np.abs(np.diff(np.moveaxis(occupied, axis, 0), axis=0))[:, 1:-1, 1:-1]
        others = [widths[k] for k in range(3) if k != axis]
        area += float(np.sum(changes * (others[0][:, None] * others[1][None, :])))

    edges: List[PolytopeEdge] = []
    for axis in range(3):
        moved = np.moveaxis(occupied, axis, -1)[..., 1:-1]
        a, b = moved[:-1, :-1], moved[1:, :-1]
        c, d = moved[:-1, 1:], moved[1:, 1:]
        count = a + b + c + d
        if np.any((count == 2) & (a == d)):
            raise GeometryError("boxes touch along an edge only")
        others = [k for k in range(3) if k != axis]
        for i, j in zip(*np.nonzero(np.any((count == 1) | (count == 3), axis=-1))):
            run_kind, run_start = 0, 0
            line = count[i, j]
            for k in range(len(line) + 1):
                kind = int(line[k]) if k < len(line) and line[k] in (1, 3) else 0
                if kind == run_kind:
                    continue
                if run_kind:
                    start = [0.0] * 3
                    start[others[0]], start[others[1]] = axes[others[0]][i], axes[others[1]][j]
                    start[axis] = axes[axis][run_start]
                    end = list(start)
                    end[axis] = axes[axis][k]
                    edges.append(PolytopeEdge(
                        length=float(axes[axis][k] - axes[axis][run_start]),
                        dihedral=0.5 * math.pi if run_kind == 1 else 1.5 * math.pi,
                        start=tuple(map(float, start)),
                        end=tuple(map(float, end)),
                    ))
                run_kind, run_start = kind, k

    codes = np.zeros(tuple(n + 1 for n in shape), dtype=np.int32)
    for di in (0, 1):
        for dj in (0, 1):
            for dk in (0, 1):
                block = occupied[di:di + shape[0] + 1, dj:dj + shape[1] + 1, dk:dk + shape[2] + 1]
                codes |= block.astype(np.int32) << (7 - (4 * di + 2 * dj + dk))
    if not np.all(_MANIFOLD_VERTEX[codes]):
        raise GeometryError("boxes touch at a corner only")

    totals = (math.fsum(b.volume for b in boxes), math.fsum(b.surface_area for b in boxes) - 2.0 * contact)
    logger.debug(f"Box union of {len(boxes)} box(es): volume {volume}, area {area}, {len(edges)} edge(s)")
    return PolytopeSummary(volume=volume, surface_area=area, edges=edges, inclusion_exclusion=totals)


def polytope_coefficients(P: PolytopeSummary) -> SteinerCoeffs3D:
    """
    (L1, L2, L3) of a polytope.

    L3 is the volume and L2 half the surface area. A convex edge of internal
    angle alpha adds (pi - alpha) l / (2 pi); a reflex edge of internal angle
    gamma adds cot(gamma/2) l / pi, which is negative.
    """
    parts = []
    for edge in P.edges:
        if edge.convex:
            parts.append((math.pi - edge.dihedral) * edge.length / (2.0 * math.pi))
        else:
            parts.append(edge.length / (math.tan(edge.dihedral / 2.0) * math.pi))
    return SteinerCoeffs3D(
        L1=math.fsum(parts),
        L2=P.surface_area / 2.0,
        L3=P.volume,
        provenance=Provenance.EXACT,
    )


def dihedral_subtraction_constant(alpha: float) -> float:
    """((pi + alpha)/2 + cot(alpha/2)) / pi for alpha in (0, pi)."""
    if not 0.0 < alpha < math.pi:
        raise GeometryError(f"alpha must lie in (0, pi), got {alpha}")
    return ((math.pi + alpha) / 2.0 + 1.0 / math.tan(alpha / 2.0)) / math.pi
