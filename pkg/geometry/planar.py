"""
Planar sets bounded by segments and circular arcs.

A set is a list of disjoint components. A region component has an outer
loop, optional hole loops and optional whiskers (open chains touching the
boundary at one end). A curve component is an open or closed chain with
empty interior, and a point component is a single point.

After validation outer loops run counter-clockwise and holes clockwise, so
the interior is always on the left of the direction of travel. Every
non-smooth vertex is classified into one IrregularPoint kind; the exact
Steiner coefficients follow from that classification.
"""
import logging
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from shapely.geometry import LinearRing, LineString, Point, Polygon
from shapely.ops import split, unary_union

from core.models import Provenance, SteinerCoeffs2D


logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
ANGLE_TOLERANCE = 1e-9
TWO_PI = 2.0 * math.pi
# angular step used when arcs are flattened for shapely predicates
ARC_RESOLUTION = math.pi / 256

Point2 = Tuple[float, float]


class GeometryError(ValueError):
    """Exception raised when a geometry description is invalid or excluded."""
    pass


def _turn(d_in: Sequence[float], d_out: Sequence[float]) -> float:
    """Signed angle in (-pi, pi] from direction d_in to direction d_out."""
    cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
    dot = d_in[0] * d_out[0] + d_in[1] * d_out[1]
    return math.atan2(cross, dot)


def _fmt(point: Sequence[float]) -> str:
    return f"({point[0]:.6g}, {point[1]:.6g})"


class EdgeKind(str, Enum):
    """Edge primitive."""
    SEGMENT = "segment"
    ARC = "arc"


class Edge(BaseModel):
    """
    A segment or a circular arc.

    Segments use the JSON keys "from"/"to". Arcs run from from_angle to
    to_angle around center, counter-clockwise when ccw is true.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    kind: EdgeKind = Field(alias="type")
    p0: Optional[Point2] = Field(default=None, alias="from")
    p1: Optional[Point2] = Field(default=None, alias="to")
    center: Optional[Point2] = None
    radius: Optional[float] = None
    from_angle: Optional[float] = None
    to_angle: Optional[float] = None
    ccw: bool = True

    @model_validator(mode="after")
    def _check_edge(self) -> "Edge":
        if self.kind is EdgeKind.SEGMENT:
            if self.p0 is None or self.p1 is None:
                raise ValueError("segment needs 'from' and 'to'")
            if not all(math.isfinite(c) for c in (*self.p0, *self.p1)):
                raise ValueError("segment endpoints must be finite")
            if math.dist(self.p0, self.p1) <= TOLERANCE:
                raise ValueError(f"segment at {_fmt(self.p0)} has zero length")
        else:
            if None in (self.center, self.radius, self.from_angle, self.to_angle):
                raise ValueError("arc needs 'center', 'radius', 'from_angle' and 'to_angle'")
            if not all(math.isfinite(c) for c in (*self.center, self.radius, self.from_angle, self.to_angle)):
                raise ValueError("arc parameters must be finite")
            if not self.radius > 0:
                raise ValueError(f"arc radius must be positive, got {self.radius}")
            if not TOLERANCE < self.sweep < TWO_PI - TOLERANCE:
                raise ValueError("arc sweep must lie strictly between 0 and 2*pi")
        return self

    @classmethod
    def segment(cls, start: Sequence[float], end: Sequence[float]) -> "Edge":
        return cls(kind=EdgeKind.SEGMENT, p0=tuple(map(float, start)), p1=tuple(map(float, end)))

    @classmethod
    def arc(cls, center: Sequence[float], radius: float, from_angle: float, to_angle: float,
            ccw: bool = True) -> "Edge":
        return cls(kind=EdgeKind.ARC, center=tuple(map(float, center)), radius=float(radius),
                   from_angle=float(from_angle), to_angle=float(to_angle), ccw=ccw)

    @property
    def is_segment(self) -> bool:
        return self.kind is EdgeKind.SEGMENT

    @property
    def sweep(self) -> float:
        """Unsigned angular extent of an arc."""
        raw = self.to_angle - self.from_angle if self.ccw else self.from_angle - self.to_angle
        return raw % TWO_PI

    @property
    def signed_sweep(self) -> float:
        return self.sweep if self.ccw else -self.sweep

    @property
    def length(self) -> float:
        if self.is_segment:
            return math.dist(self.p0, self.p1)
        return self.radius * self.sweep

    @property
    def curvature(self) -> float:
        """Signed curvature: 0 on segments, +1/R on ccw arcs, -1/R on cw arcs."""
        if self.is_segment:
            return 0.0
        return 1.0 / self.radius if self.ccw else -1.0 / self.radius

    @property
    def turning(self) -> float:
        """Integrated signed curvature along the edge."""
        return 0.0 if self.is_segment else self.signed_sweep

    def _angle_at(self, s: float) -> float:
        return self.from_angle + self.signed_sweep * (s / self.length)

    def point_at(self, s: float) -> Point2:
        """Point at arc-length position s from the start."""
        if self.is_segment:
            t = s / self.length
            return (self.p0[0] + t * (self.p1[0] - self.p0[0]), self.p0[1] + t * (self.p1[1] - self.p0[1]))
        theta = self._angle_at(s)
        return (self.center[0] + self.radius * math.cos(theta), self.center[1] + self.radius * math.sin(theta))

    def tangent_at(self, s: float) -> Point2:
        """Unit tangent in the direction of travel at arc-length position s."""
        if self.is_segment:
            length = self.length
            return ((self.p1[0] - self.p0[0]) / length, (self.p1[1] - self.p0[1]) / length)
        theta = self._angle_at(s)
        if self.ccw:
            return (-math.sin(theta), math.cos(theta))
        return (math.sin(theta), -math.cos(theta))

    def start_point(self) -> Point2:
        return self.p0 if self.is_segment else self.point_at(0.0)

    def end_point(self) -> Point2:
        return self.p1 if self.is_segment else self.point_at(self.length)

    def start_tangent(self) -> Point2:
        return self.tangent_at(0.0)

    def end_tangent(self) -> Point2:
        return self.tangent_at(self.length)

    def area_term(self) -> float:
        """Contribution (x dy - y dx)/2 of the edge to a signed loop area."""
        if self.is_segment:
            (x0, y0), (x1, y1) = self.p0, self.p1
            return 0.5 * (x0 * y1 - x1 * y0)
        cx, cy = self.center
        r = self.radius
        a0 = self.from_angle
        a1 = a0 + self.signed_sweep
        return 0.5 * (cx * r * (math.sin(a1) - math.sin(a0))
                      - cy * r * (math.cos(a1) - math.cos(a0))
                      + r * r * (a1 - a0))

    def reversed(self) -> "Edge":
        if self.is_segment:
            return Edge.segment(self.p1, self.p0)
        return Edge.arc(self.center, self.radius, self.to_angle, self.from_angle, not self.ccw)

    def split(self, s: float) -> Tuple["Edge", "Edge"]:
        """Split at arc-length position s, 0 < s < length."""
        if self.is_segment:
            middle = self.point_at(s)
            return Edge.segment(self.p0, middle), Edge.segment(middle, self.p1)
        theta = self._angle_at(s)
        end = self.from_angle + self.signed_sweep
        return (Edge.arc(self.center, self.radius, self.from_angle, theta, self.ccw),
                Edge.arc(self.center, self.radius, theta, end, self.ccw))

    def sample(self, step: float) -> np.ndarray:
        """Points at arc-length spacing at most `step`, both ends included."""
        count = max(1, math.ceil(self.length / step - 1e-12))
        s = np.linspace(0.0, self.length, count + 1)
        if self.is_segment:
            p0 = np.asarray(self.p0)
            return p0 + (s / self.length)[:, None] * (np.asarray(self.p1) - p0)
        theta = self.from_angle + self.signed_sweep * (s / self.length)
        return np.column_stack((self.center[0] + self.radius * np.cos(theta),
                                self.center[1] + self.radius * np.sin(theta)))

    def polyline(self) -> np.ndarray:
        """Flattened vertices used for shapely predicates."""
        if self.is_segment:
            return np.array([self.p0, self.p1], dtype=float)
        return self.sample(self.radius * ARC_RESOLUTION)

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Exact Euclidean distance from each point (last axis of size 2) to the edge."""
        points = np.asarray(points, dtype=float)
        if self.is_segment:
            a = np.asarray(self.p0)
            d = np.asarray(self.p1) - a
            t = np.clip(((points - a) @ d) / (d @ d), 0.0, 1.0)
            gap = points - a - t[..., None] * d
            return np.hypot(gap[..., 0], gap[..., 1])

        rel = points - np.asarray(self.center)
        r = np.hypot(rel[..., 0], rel[..., 1])
        phi = np.arctan2(rel[..., 1], rel[..., 0])
        if self.ccw:
            offset = np.mod(phi - self.from_angle, TWO_PI)
        else:
            offset = np.mod(self.from_angle - phi, TWO_PI)
        radial = np.abs(r - self.radius)
        start = points - np.asarray(self.start_point())
        end = points - np.asarray(self.end_point())
        ends = np.minimum(np.hypot(start[..., 0], start[..., 1]), np.hypot(end[..., 0], end[..., 1]))
        return np.where(offset <= self.sweep, radial, ends)

    def locate(self, point: Sequence[float]) -> Optional[float]:
        """Arc-length position of `point` if it lies on the edge, else None."""
        if self.is_segment:
            a = np.asarray(self.p0)
            d = np.asarray(self.p1) - a
            length = self.length
            s = float((np.asarray(point) - a) @ d) / length
            if -TOLERANCE <= s <= length + TOLERANCE:
                s = min(max(s, 0.0), length)
                if math.dist(self.point_at(s), point) <= TOLERANCE:
                    return s
            return None

        dx, dy = point[0] - self.center[0], point[1] - self.center[1]
        if abs(math.hypot(dx, dy) - self.radius) > TOLERANCE:
            return None
        phi = math.atan2(dy, dx)
        offset = (phi - self.from_angle) % TWO_PI if self.ccw else (self.from_angle - phi) % TWO_PI
        slack = TOLERANCE / self.radius
        if offset <= self.sweep + slack:
            return min(offset, self.sweep) * self.radius
        if offset >= TWO_PI - slack:
            return 0.0
        return None


def _reverse_chain(edges: Sequence[Edge]) -> List[Edge]:
    return [edge.reversed() for edge in reversed(edges)]


def _chain_polyline(edges: Sequence[Edge]) -> np.ndarray:
    parts = [edges[0].polyline()]
    for edge in edges[1:]:
        parts.append(edge.polyline()[1:])
    return np.vstack(parts)


def signed_area(edges: Sequence[Edge]) -> float:
    """Signed area enclosed by a closed loop, exact for arcs; positive counter-clockwise."""
    return math.fsum(edge.area_term() for edge in edges)


def _chain_length(edges: Sequence[Edge]) -> float:
    return math.fsum(edge.length for edge in edges)


def _is_closed(edges: Sequence[Edge]) -> bool:
    return math.dist(edges[-1].end_point(), edges[0].start_point()) <= TOLERANCE


def _same_curvature(a: Edge, b: Edge) -> bool:
    return abs(a.curvature - b.curvature) <= TOLERANCE


def turning_total(edges: Sequence[Edge]) -> float:
    """
    Total turning of a closed loop: exterior turning angles at the vertices
    plus the integrated signed curvature of the edges.

    Equals 2*pi for a simple counter-clockwise loop and -2*pi clockwise.
    """
    vertex_turns = [_turn(edges[i - 1].end_tangent(), edges[i].start_tangent()) for i in range(len(edges))]
    return math.fsum(vertex_turns) + math.fsum(edge.turning for edge in edges)


class ComponentKind(str, Enum):
    """Kind of connected component."""
    REGION = "region"
    CURVE = "curve"
    POINT = "point"


class Component(BaseModel):
    """One connected component of a planar set."""
    model_config = ConfigDict(frozen=True)

    kind: ComponentKind
    outer: List[Edge] = Field(default_factory=list)
    holes: List[List[Edge]] = Field(default_factory=list)
    whiskers: List[List[Edge]] = Field(default_factory=list)
    curve: List[Edge] = Field(default_factory=list)
    closed: bool = False
    point: Optional[Point2] = None

    def loops(self) -> List[List[Edge]]:
        if self.kind is ComponentKind.REGION:
            return [self.outer, *self.holes]
        if self.kind is ComponentKind.CURVE and self.closed:
            return [self.curve]
        return []

    def chains(self) -> List[List[Edge]]:
        """Every edge chain: loops, whiskers and curves."""
        if self.kind is ComponentKind.REGION:
            return [self.outer, *self.holes, *self.whiskers]
        if self.kind is ComponentKind.CURVE:
            return [self.curve]
        return []

    def edges(self) -> List[Edge]:
        return [edge for chain in self.chains() for edge in chain]

    def region(self) -> Optional[Polygon]:
        """Flattened interior as a shapely polygon (None without interior)."""
        if self.kind is not ComponentKind.REGION:
            return None
        return Polygon(_chain_polyline(self.outer), [_chain_polyline(hole) for hole in self.holes])

    def geometry(self):
        """Flattened shapely geometry of the whole component."""
        if self.kind is ComponentKind.POINT:
            return Point(self.point)
        if self.kind is ComponentKind.CURVE:
            return LineString(_chain_polyline(self.curve))
        return unary_union([self.region(), *(LineString(_chain_polyline(w)) for w in self.whiskers)])

    def bounds(self) -> Tuple[float, float, float, float]:
        if self.kind is ComponentKind.POINT:
            x, y = self.point
            return (x, y, x, y)
        points = np.vstack([_chain_polyline(chain) for chain in self.chains()])
        return (float(points[:, 0].min()), float(points[:, 1].min()),
                float(points[:, 0].max()), float(points[:, 1].max()))


class IrregularKind(str, Enum):
    """Classification of a non-smooth vertex."""
    CONVEX_BINARY = "convex-binary"
    CONCAVE_BINARY = "concave-binary"
    ANGLE = "angle"
    CONCAVE_TERNARY = "concave-ternary"


class IrregularPoint(BaseModel):
    """
    A non-smooth boundary point and its concave angles.

    Convex binary points carry no angle; concave binary and angle points
    carry one angle in [0, pi); ternary points carry (beta1, beta2) with
    beta1 + beta2 <= pi and count with multiplicity two.
    """
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    location: Point2
    kind: IrregularKind
    angles: Tuple[float, ...] = ()
    component: int = 0

    @model_validator(mode="after")
    def _check_angles(self) -> "IrregularPoint":
        expected = {
            IrregularKind.CONVEX_BINARY: 0,
            IrregularKind.CONCAVE_BINARY: 1,
            IrregularKind.ANGLE: 1,
            IrregularKind.CONCAVE_TERNARY: 2,
        }[self.kind]
        if len(self.angles) != expected:
            raise ValueError(f"{self.kind.value} point needs {expected} angle(s), got {len(self.angles)}")
        for beta in self.angles:
            if not 0.0 <= beta < math.pi:
                raise ValueError(f"angle {beta} outside [0, pi)")
        if self.kind is IrregularKind.CONCAVE_TERNARY and sum(self.angles) > math.pi + ANGLE_TOLERANCE:
            raise ValueError(f"excluded configuration: beta1 + beta2 = {sum(self.angles)} > pi")
        return self


class PlanarSet(BaseModel):
    """A validated planar set with its classified irregular points."""
    model_config = ConfigDict(frozen=True)

    components: List[Component]
    irregular_points: List[IrregularPoint] = Field(default_factory=list)

    def bounds(self) -> Tuple[float, float, float, float]:
        boxes = np.array([component.bounds() for component in self.components])
        return (float(boxes[:, 0].min()), float(boxes[:, 1].min()),
                float(boxes[:, 2].max()), float(boxes[:, 3].max()))

    @property
    def diameter(self) -> float:
        """Diagonal of the bounding box (an upper bound on the diameter)."""
        x0, y0, x1, y1 = self.bounds()
        return math.hypot(x1 - x0, y1 - y0)

    def points_of(self, kind: IrregularKind) -> List[IrregularPoint]:
        return [p for p in self.irregular_points if p.kind is kind]

    def edges(self) -> List[Edge]:
        return [edge for component in self.components for edge in component.edges()]


def _parse_chain(raw: Any, label: str) -> List[Edge]:
    if not isinstance(raw, list) or not raw:
        raise GeometryError(f"{label}: expected a non-empty list of edges")
    edges = []
    for i, item in enumerate(raw):
        try:
            edges.append(Edge.model_validate(item))
        except ValidationError as e:
            message = e.errors()[0].get("msg", str(e))
            raise GeometryError(f"{label}, edge {i}: {message}") from e
    for i in range(len(edges) - 1):
        if math.dist(edges[i].end_point(), edges[i + 1].start_point()) > TOLERANCE:
            raise GeometryError(f"{label}: edge {i} does not end where edge {i + 1} starts")
    return edges


def _chain_angle_points(edges: Sequence[Edge], closed: bool, component: int) -> List[IrregularPoint]:
    pairs = list(zip(edges[:-1], edges[1:]))
    if closed:
        pairs.append((edges[-1], edges[0]))
    points = []
    for e_in, e_out in pairs:
        tau = _turn(e_in.end_tangent(), e_out.start_tangent())
        location = e_out.start_point()
        if abs(tau) >= math.pi - ANGLE_TOLERANCE:
            raise GeometryError(f"excluded configuration: cusp at {_fmt(location)}")
        if abs(tau) <= ANGLE_TOLERANCE and _same_curvature(e_in, e_out):
            continue
        points.append(IrregularPoint(location=location, kind=IrregularKind.ANGLE,
                                     angles=(abs(tau),), component=component))
    return points


def _classify_loop(edges: Sequence[Edge], whisker_dirs: Dict[int, Point2], component: int) -> List[IrregularPoint]:
    points = []
    for i in range(len(edges)):
        e_in, e_out = edges[i - 1], edges[i]
        d_in, d_out = e_in.end_tangent(), e_out.start_tangent()
        location = e_out.start_point()

        if i in whisker_dirs:
            e = whisker_dirs[i]
            beta1 = -_turn(d_in, e)
            beta2 = -_turn((-e[0], -e[1]), d_out)
            if beta1 < -ANGLE_TOLERANCE or beta2 < -ANGLE_TOLERANCE:
                raise GeometryError(f"whisker at {_fmt(location)} points into the interior")
            beta1, beta2 = max(beta1, 0.0), max(beta2, 0.0)
            if beta1 + beta2 > math.pi + ANGLE_TOLERANCE:
                raise GeometryError(
                    f"excluded configuration: ternary point at {_fmt(location)} "
                    f"has beta1 + beta2 = {beta1 + beta2:.6g} > pi")
            points.append(IrregularPoint(location=location, kind=IrregularKind.CONCAVE_TERNARY,
                                         angles=(beta1, min(beta2, math.pi - beta1)), component=component))
            continue

        tau = _turn(d_in, d_out)
        if abs(tau) >= math.pi - ANGLE_TOLERANCE:
            raise GeometryError(f"excluded configuration: cusp at {_fmt(location)}")
        if abs(tau) <= ANGLE_TOLERANCE and _same_curvature(e_in, e_out):
            continue
        if tau >= -ANGLE_TOLERANCE:
            points.append(IrregularPoint(location=location, kind=IrregularKind.CONVEX_BINARY, component=component))
        else:
            points.append(IrregularPoint(location=location, kind=IrregularKind.CONCAVE_BINARY,
                                         angles=(-tau,), component=component))
    return points


def _attach(loops: List[List[Edge]], point: Point2) -> Optional[Tuple[int, int]]:
    """
    Find where `point` lies on the loops, splitting an edge if needed.

    Returns (loop index, vertex index) or None when the point is off the
    boundary. Loops are modified in place.
    """
    for li, loop in enumerate(loops):
        for ei, edge in enumerate(loop):
            s = edge.locate(point)
            if s is None:
                continue
            if s <= TOLERANCE:
                return li, ei
            if s >= edge.length - TOLERANCE:
                return li, (ei + 1) % len(loop)
            loop[ei:ei + 1] = list(edge.split(s))
            return li, ei + 1
    return None


def _on_boundary(loops: Sequence[Sequence[Edge]], point: Point2) -> bool:
    return any(edge.locate(point) is not None for loop in loops for edge in loop)


def _validate_region(raw: Dict[str, Any], index: int) -> Tuple[Component, List[IrregularPoint]]:
    label = f"component {index}"
    outer = _parse_chain(raw["outer"], f"{label} outer loop")
    holes = [_parse_chain(h, f"{label} hole {j}") for j, h in enumerate(raw.get("holes") or [])]
    whiskers = [_parse_chain(w, f"{label} whisker {j}") for j, w in enumerate(raw.get("whiskers") or [])]

    loops = [outer, *holes]
    for j, loop in enumerate(loops):
        if not _is_closed(loop):
            raise GeometryError(f"{label} loop {j} is not closed")
        if not LinearRing(_chain_polyline(loop)).is_simple:
            raise GeometryError(f"{label} loop {j} is self-intersecting")

    if signed_area(outer) < 0:
        outer = _reverse_chain(outer)
    holes = [_reverse_chain(h) if signed_area(h) > 0 else h for h in holes]
    loops = [outer, *holes]

    for j, loop in enumerate(loops):
        expected = TWO_PI if j == 0 else -TWO_PI
        total = turning_total(loop)
        if abs(total - expected) > 1e-9:
            raise GeometryError(f"{label} loop {j} turns by {total:.12g}, expected {expected:.12g}")

    region = Polygon(_chain_polyline(outer), [_chain_polyline(h) for h in holes])
    if not region.is_valid:
        raise GeometryError(f"{label}: boundary loops intersect or a hole lies outside the outer loop")

    rings = [LinearRing(_chain_polyline(loop)) for loop in loops]
    for j in range(len(rings)):
        for k in range(j + 1, len(rings)):
            contact = rings[j].intersection(rings[k])
            if not contact.is_empty:
                point = shapely.get_coordinates(contact)[0]
                raise GeometryError(f"excluded configuration: vertex of order 4 at {_fmt(point)}")

    oriented = []
    for j, chain in enumerate(whiskers):
        if len(chain) > 1 and _is_closed(chain):
            raise GeometryError(f"{label} whisker {j} is closed")
        start_on = _on_boundary(loops, chain[0].start_point())
        end_on = _on_boundary(loops, chain[-1].end_point())
        if start_on == end_on:
            raise GeometryError(f"{label} whisker {j} must touch the boundary at exactly one end")
        if end_on:
            chain = _reverse_chain(chain)

        line = LineString(_chain_polyline(chain))
        if not line.is_simple:
            raise GeometryError(f"{label} whisker {j} is self-intersecting")
        anchor = Point(chain[0].start_point())
        contact = line.intersection(region.boundary)
        if not contact.difference(anchor.buffer(1e-6)).is_empty:
            raise GeometryError(f"{label} whisker {j} crosses the boundary")
        if region.contains(line.interpolate(0.5, normalized=True)):
            raise GeometryError(f"{label} whisker {j} lies inside the interior")
        oriented.append(chain)

    for j in range(len(oriented)):
        for k in range(j + 1, len(oriented)):
            a, b = oriented[j][0].start_point(), oriented[k][0].start_point()
            if math.dist(a, b) <= TOLERANCE:
                raise GeometryError(f"excluded configuration: vertex of order 4 at {_fmt(a)}")
            if LineString(_chain_polyline(oriented[j])).intersects(LineString(_chain_polyline(oriented[k]))):
                raise GeometryError(f"{label} whiskers {j} and {k} intersect")

    loops = [list(outer), *(list(h) for h in holes)]
    for chain in oriented:
        _attach(loops, chain[0].start_point())

    irregular: List[IrregularPoint] = []
    for loop in loops:
        whisker_dirs = {}
        for chain in oriented:
            anchor = chain[0].start_point()
            for vi, edge in enumerate(loop):
                if math.dist(edge.start_point(), anchor) <= TOLERANCE:
                    whisker_dirs[vi] = chain[0].start_tangent()
        irregular.extend(_classify_loop(loop, whisker_dirs, index))
    for chain in oriented:
        irregular.extend(_chain_angle_points(chain, closed=False, component=index))

    component = Component(kind=ComponentKind.REGION, outer=loops[0], holes=loops[1:], whiskers=oriented)
    return component, irregular


def _validate_curve(raw: Dict[str, Any], index: int) -> Tuple[Component, List[IrregularPoint]]:
    edges = _parse_chain(raw["curve"], f"component {index} curve")
    closed = len(edges) > 1 and _is_closed(edges)
    line = _chain_polyline(edges)
    simple = LinearRing(line[:-1]).is_simple if closed else LineString(line).is_simple
    if not simple:
        raise GeometryError(f"component {index} curve is self-intersecting")
    component = Component(kind=ComponentKind.CURVE, curve=edges, closed=closed)
    return component, _chain_angle_points(edges, closed, index)


def _validate_component(raw: Any, index: int) -> Tuple[Component, List[IrregularPoint]]:
    if not isinstance(raw, dict):
        raise GeometryError(f"component {index}: expected an object")
    if "point" in raw:
        try:
            x, y = (float(c) for c in raw["point"])
        except (TypeError, ValueError) as e:
            raise GeometryError(f"component {index}: point must be [x, y]") from e
        return Component(kind=ComponentKind.POINT, point=(x, y)), []
    if "curve" in raw:
        return _validate_curve(raw, index)
    if "outer" in raw:
        return _validate_region(raw, index)
    raise GeometryError(f"component {index}: needs 'outer', 'curve' or 'point'")


def validate_set(raw: Dict[str, Any]) -> PlanarSet:
    """
    Validate a raw geometry description and classify its irregular points.

    Args:
        raw: Parsed JSON document {"dimension": 2, "components": [...]}

    Returns:
        The validated PlanarSet

    Raises:
        GeometryError: If loops self-intersect, whiskers are not attached at
            exactly one end, or the set is an excluded configuration
    """
    if not isinstance(raw, dict):
        raise GeometryError("geometry must be a JSON object")
    if raw.get("dimension", 2) != 2:
        raise GeometryError(f"expected a planar geometry, got dimension {raw.get('dimension')}")
    raw_components = raw.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        raise GeometryError("geometry needs a non-empty 'components' list")

    components: List[Component] = []
    irregular: List[IrregularPoint] = []
    for index, raw_component in enumerate(raw_components):
        component, points = _validate_component(raw_component, index)
        components.append(component)
        irregular.extend(points)

    shapes = [component.geometry() for component in components]
    for i in range(len(shapes)):
        for j in range(i + 1, len(shapes)):
            if shapes[i].intersects(shapes[j]):
                raise GeometryError(f"components {i} and {j} intersect")

    logger.debug(f"Validated planar set: {len(components)} component(s), {len(irregular)} irregular point(s)")
    return PlanarSet(components=components, irregular_points=irregular)


def interior_area(S: PlanarSet) -> float:
    """Area of the interior, exact for segments and arcs."""
    return math.fsum(signed_area(loop)
                     for component in S.components if component.kind is ComponentKind.REGION
                     for loop in component.loops())


def euler_characteristic(S: PlanarSet) -> int:
    """Components minus holes; closed pure curves count as one loop each."""
    total = 0
    for component in S.components:
        if component.kind is ComponentKind.REGION:
            total += 1 - len(component.holes)
        elif component.kind is ComponentKind.CURVE:
            total += 0 if component.closed else 1
        else:
            total += 1
    return total


def outer_minkowski_content(S: PlanarSet) -> float:
    """Boundary length with isolated edges (whiskers, pure curves) counted twice."""
    parts = []
    for component in S.components:
        if component.kind is ComponentKind.REGION:
            parts.extend(_chain_length(loop) for loop in component.loops())
            parts.extend(2.0 * _chain_length(w) for w in component.whiskers)
        elif component.kind is ComponentKind.CURVE:
            parts.append(2.0 * _chain_length(component.curve))
    return math.fsum(parts)


def concave_summand(beta: float) -> float:
    """beta/2 - tan(beta/2): zero at 0, strictly decreasing on (0, pi)."""
    return beta / 2.0 - math.tan(beta / 2.0)


def concavity_correction(S: PlanarSet) -> float:
    """(1/pi) times the sum of beta/2 - tan(beta/2) over every concave angle."""
    return math.fsum(concave_summand(beta) for point in S.irregular_points for beta in point.angles) / math.pi


def steiner_coefficients_2d(S: PlanarSet) -> SteinerCoeffs2D:
    """Exact (sigma2, L1, L0) of a validated planar set."""
    return SteinerCoeffs2D(
        sigma2=interior_area(S),
        L1=outer_minkowski_content(S),
        L0=euler_characteristic(S) + concavity_correction(S),
        provenance=Provenance.EXACT,
    )


_EMPTY = SteinerCoeffs2D(sigma2=0.0, L1=0.0, L0=0.0)


def glue_coefficients(parts: Sequence[Optional[SteinerCoeffs2D]],
                      unions: Sequence[Optional[SteinerCoeffs2D]],
                      c13: float, c123: float,
                      sigma2: Optional[float] = None) -> SteinerCoeffs2D:
    """
    Coefficients of S = S1 u S2 u S3 u S4 from its parts.

    Args:
        parts: Coefficients of S1, S2, S3 and optionally S4 (None or
            missing means S4 is empty)
        unions: Coefficients of S1uS2, S2uS3 and, when S4 is not empty,
            S3uS4 and S4uS1
        c13: Constant of the eps^2 area of the S1/S3 tube intersection
        c123: Constant of the eps^2 area of the S1/S2/S3 tube intersection
        sigma2: Area of S; defaults to the sum of part areas

    Returns:
        The glued coefficients
    """
    parts = list(parts) + [None] * (4 - len(parts))
    s1, s2, s3, s4 = (p or _EMPTY for p in parts)
    unions = list(unions)
    if len(unions) == 2:
        if parts[3] is not None:
            raise ValueError("S3uS4 and S4uS1 are required when S4 is not empty")
        unions += [s3, s1]
    u12, u23, u34, u41 = unions

    L1 = math.fsum([u12.L1, u23.L1, u34.L1, u41.L1, -s1.L1, -s2.L1, -s3.L1, -s4.L1])
    L0 = math.fsum([u12.L0, u23.L0, u34.L0, u41.L0, -s1.L0, -s2.L0, -s3.L0, -s4.L0, (c123 - c13) / math.pi])
    if sigma2 is None:
        sigma2 = math.fsum([s1.sigma2, s2.sigma2, s3.sigma2, s4.sigma2])
    return SteinerCoeffs2D(sigma2=sigma2, L1=L1, L0=L0, provenance=Provenance.EXACT)


def intersection_tube_constants(vertex: IrregularPoint) -> Tuple[float, float]:
    """
    (C13, C123) for the decomposition at a concave binary or angle point.

    C13 = (pi - beta) + 2 tan(beta/2), C123 = (pi - beta) + beta/2 + tan(beta/2).
    """
    if vertex.kind not in (IrregularKind.CONCAVE_BINARY, IrregularKind.ANGLE):
        raise GeometryError(f"tube constants need a concave binary or angle point, got {vertex.kind.value}")
    return tube_constants(vertex.angles[0])


def tube_constants(beta: float) -> Tuple[float, float]:
    if not 0.0 <= beta < math.pi:
        raise GeometryError(f"beta must lie in [0, pi), got {beta}")
    half = math.tan(beta / 2.0)
    return (math.pi - beta) + 2.0 * half, (math.pi - beta) + beta / 2.0 + half


def tangent_pair_intersection_area(R: float, eps: float) -> Tuple[float, float]:
    """
    Area of the intersection of the eps-tubes of a circle arc of radius R
    and a segment tangent to it at an endpoint.

    Returns:
        Tuple (exact, asymptotic) where asymptotic is
        (pi/2) eps^2 + (8/3) sqrt(R) eps^(3/2)
    """
    if not R > 0:
        raise GeometryError(f"radius must be positive, got {R}")
    if eps < 0:
        raise GeometryError(f"eps must be non-negative, got {eps}")
    if eps >= R:
        raise GeometryError(f"eps={eps} must be smaller than R={R}")
    root = math.sqrt(R * eps)
    exact = (0.5 * math.pi * eps * eps
             + 0.5 * (R + eps) ** 2 * math.asin(2.0 * root / (R + eps))
             - (R - eps) * root)
    asymptotic = 0.5 * math.pi * eps * eps + (8.0 / 3.0) * math.sqrt(R) * eps ** 1.5
    return exact, asymptotic


def _polygon_set(polygon: Polygon) -> PlanarSet:
    coords = [tuple(map(float, c)) for c in polygon.exterior.coords[:-1]]
    vertices: List[Point2] = []
    for c in coords:
        if not vertices or math.dist(vertices[-1], c) > TOLERANCE:
            vertices.append(c)
    if math.dist(vertices[0], vertices[-1]) <= TOLERANCE:
        vertices.pop()
    edges = [{"type": "segment", "from": list(vertices[i]), "to": list(vertices[(i + 1) % len(vertices)])}
             for i in range(len(vertices))]
    return validate_set({"dimension": 2, "components": [{"outer": edges}]})


def _chord(polygon: Polygon, origin: np.ndarray, direction: np.ndarray, reach: float) -> LineString:
    """Segment from `origin` along `direction` up to the first boundary hit, slightly extended."""
    ray = LineString([origin, origin + reach * direction])
    hits = shapely.get_coordinates(ray.intersection(polygon.exterior))
    distances = np.hypot(*(hits - origin).T) if len(hits) else np.array([])
    candidates = distances[distances > 1e3 * TOLERANCE]
    if not len(candidates):
        raise GeometryError(f"no boundary hit from {_fmt(origin)}")
    first = float(candidates.min())
    return LineString([origin, origin + (first + 1e-7 * reach) * direction])


def split_at_concave_vertex(S: PlanarSet, vertex: IrregularPoint) -> Tuple[PlanarSet, PlanarSet, PlanarSet]:
    """
    Cut a polygonal region at a concave binary vertex.

    The incoming edge is prolonged forward and the outgoing edge backward
    into the interior. S1 holds the incoming edge, S3 the outgoing edge and
    S2 is the wedge between the two chords.
    """
    if vertex.kind is not IrregularKind.CONCAVE_BINARY:
        raise GeometryError(f"can only split at a concave binary point, got {vertex.kind.value}")
    component = S.components[vertex.component]
    if (component.kind is not ComponentKind.REGION or component.holes or component.whiskers
            or not all(edge.is_segment for edge in component.outer)):
        raise GeometryError("splitting needs a polygonal region without holes or whiskers")

    outer = component.outer
    index = next((i for i, edge in enumerate(outer)
                  if math.dist(edge.start_point(), vertex.location) <= TOLERANCE), None)
    if index is None:
        raise GeometryError(f"{_fmt(vertex.location)} is not a vertex of component {vertex.component}")

    origin = np.asarray(outer[index].start_point(), dtype=float)
    d_in = np.asarray(outer[index - 1].end_tangent())
    d_out = np.asarray(outer[index].start_tangent())
    polygon = component.region()
    reach = 2.0 * S.diameter

    def _two_pieces(shape: Polygon, chord: LineString) -> List[Polygon]:
        pieces = [g for g in split(shape, chord).geoms if g.area > TOLERANCE]
        if len(pieces) != 2:
            raise GeometryError(f"chord from {_fmt(origin)} does not cut the region in two")
        return pieces

    step = 1e-3 * min(outer[index - 1].length, outer[index].length)
    probe_in = Point(origin - step * d_in)
    probe_out = Point(origin + step * d_out)

    pieces = _two_pieces(polygon, _chord(polygon, origin, d_in, reach))
    pieces.sort(key=lambda g: g.distance(probe_out))
    s3, rest = pieces
    pieces = _two_pieces(rest, _chord(rest, origin, -d_out, reach))
    pieces.sort(key=lambda g: g.distance(probe_in))
    s1, s2 = pieces

    return _polygon_set(s1), _polygon_set(s2), _polygon_set(s3)


def glued_coefficients(S: PlanarSet, vertex: IrregularPoint) -> SteinerCoeffs2D:
    """
    Coefficients of S rebuilt by gluing the pieces of split_at_concave_vertex.

    Equals steiner_coefficients_2d(S) when `vertex` is the only concave point.
    """
    s1, s2, s3 = split_at_concave_vertex(S, vertex)
    polygons = [piece.components[0].region() for piece in (s1, s2, s3)]
    u12 = _polygon_set(unary_union([polygons[0], polygons[1]]))
    u23 = _polygon_set(unary_union([polygons[1], polygons[2]]))
    c13, c123 = intersection_tube_constants(vertex)
    return glue_coefficients(
        parts=[steiner_coefficients_2d(p) for p in (s1, s2, s3)],
        unions=[steiner_coefficients_2d(u12), steiner_coefficients_2d(u23)],
        c13=c13,
        c123=c123,
    )
