"""
Grid tube-volume oracle.

Distance fields are sampled at cell centers with exact point-to-primitive
distances, so the only error is the midpoint-rule counting of cells.
Steiner coefficients are recovered by least squares on tube volumes over a
geometric grid of radii.
"""
import json
import logging
import math
import warnings
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict, Field

from core.config import GausstailConfig
from core.manager import BlockScheduler
from core.models import Provenance, SteinerCoeffs2D, SteinerCoeffs3D
from geometry.planar import ComponentKind, PlanarSet
from geometry.polytope import BoxUnion


logger = logging.getLogger(__name__)

Bounds = Tuple[Tuple[float, ...], Tuple[float, ...]]
OracleGeometry = Union[PlanarSet, BoxUnion]

# cells per block handed to a worker thread
_CHUNK_CELLS = 1 << 18


class OracleError(ValueError):
    """Exception raised when an oracle query is out of range or ill-conditioned."""
    pass


class MixedOrderWarning(UserWarning):
    """Tube-intersection volumes do not follow a single power of eps."""
    pass


class GridField(BaseModel):
    """Distance to a set at the centers of a regular grid."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    origin: Tuple[float, ...]    # lower corner of cell 0
    h: float = Field(gt=0.0)
    dims: Tuple[int, ...]
    values: np.ndarray
    margin: float = Field(ge=0.0)

    @property
    def dimension(self) -> int:
        return len(self.dims)

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dimension

    def same_grid(self, other: "GridField") -> bool:
        return self.dims == other.dims and self.h == other.h and self.origin == other.origin

    def centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + (np.arange(self.dims[axis]) + 0.5) * self.h


class SteinerFit(BaseModel):
    """Least-squares polynomial fit of tube volume against eps."""
    model_config = ConfigDict(frozen=True)

    dimension: int
    coefficients: Tuple[float, ...]    # constant, linear, quadratic[, cubic]
    residual: float
    eps: List[float]
    volumes: List[float]
    pinned: bool = False

    def _warn_negative(self, **values: float):
        negative = {name: value for name, value in values.items() if value < 0}
        if negative:
            listed = ", ".join(f"{name}={value:.6g}" for name, value in negative.items())
            logger.warning(f"Tube-volume fit gives negative {listed}; residual {self.residual:.3g}, "
                           f"eps {min(self.eps):.3g}..{max(self.eps):.3g}")

    def as_coeffs_2d(self) -> SteinerCoeffs2D:
        c0, c1, c2 = self.coefficients[:3]
        self._warn_negative(sigma2=c0, L1=c1)
        return SteinerCoeffs2D(sigma2=c0, L1=c1, L0=c2 / math.pi, provenance=Provenance.FITTED)

    def as_coeffs_3d(self) -> SteinerCoeffs3D:
        c0, c1, c2 = self.coefficients[:3]
        self._warn_negative(L3=c0, L2=c1 / 2.0)
        return SteinerCoeffs3D(L1=c2 / math.pi, L2=c1 / 2.0, L3=c0, provenance=Provenance.FITTED)


class IntersectionConstant(BaseModel):
    """Constant C of a volume law C * eps^p and its trend diagnostic."""
    model_config = ConfigDict(frozen=True)

    constant: float
    exponent: float
    slope: float          # d log(volume / eps^p) / d log(eps)
    drift: float          # relative change of the ratio across the eps range
    mixed_order: bool
    ratios: List[float]


def _lattice_step(values: Sequence[float]) -> Optional[float]:
    """Largest g such that all offsets from the minimum are integer multiples of g."""
    values = np.asarray(values, dtype=float)
    fractions = []
    for offset in values - values.min():
        f = Fraction(float(offset)).limit_denominator(1024)
        if abs(float(f) - offset) > 1e-12:
            return None
        if f:
            fractions.append(f)
    if not fractions:
        return None
    denominator = reduce(math.lcm, (f.denominator for f in fractions))
    numerator = reduce(math.gcd, (int(f * denominator) for f in fractions))
    return numerator / denominator


def _geometry_bounds(geometry: OracleGeometry) -> Bounds:
    if isinstance(geometry, PlanarSet):
        x0, y0, x1, y1 = geometry.bounds()
        return (x0, y0), (x1, y1)
    return geometry.bounds()


def _lattice_coordinates(geometry: OracleGeometry) -> Optional[List[float]]:
    """Offsets that must land on grid lines, or None if the set has curved edges."""
    if isinstance(geometry, BoxUnion):
        lo, _ = geometry.bounds()
        return [c - lo[k] for box in geometry.boxes for k in range(3) for c in (box.min[k], box.max[k])]
    if any(not edge.is_segment for edge in geometry.edges()):
        return None
    lo, _ = _geometry_bounds(geometry)
    coords = []
    for component in geometry.components:
        if component.kind is ComponentKind.POINT:
            points = [component.point]
        else:
            points = [p for edge in component.edges() for p in (edge.p0, edge.p1)]
        coords.extend(c - lo[k] for p in points for k in range(2) for c in p)
    return coords


def default_spacing(geometry: OracleGeometry, config: Optional[GausstailConfig] = None) -> float:
    """Default grid spacing h0: a fixed fraction of the bounding-box diagonal."""
    settings = (config or GausstailConfig()).oracle
    lo, hi = _geometry_bounds(geometry)
    diagonal = math.dist(lo, hi) or 1.0
    fraction = settings.h_fraction_2d if len(lo) == 2 else settings.h_fraction_3d
    return fraction * diagonal


def _planar_chunk(S: PlanarSet, polygons, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    points = np.stack((X, Y), axis=-1)
    distance = np.full(X.shape, np.inf)
    for edge in S.edges():
        np.minimum(distance, edge.distance(points), out=distance)
    for component in S.components:
        if component.kind is ComponentKind.POINT:
            np.minimum(distance, np.hypot(X - component.point[0], Y - component.point[1]), out=distance)
    for polygon in polygons:
        distance[shapely.contains_xy(polygon, X, Y)] = 0.0
    return distance


def _box_chunk(union: BoxUnion, xs: np.ndarray, ys: np.ndarray, zs: np.ndarray) -> np.ndarray:
    points = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
    return union.distance(points)


def distance_field(geometry: OracleGeometry, margin: float, h: Optional[float] = None,
                   bounds: Optional[Bounds] = None, config: Optional[GausstailConfig] = None,
                   threads: int = 1, snap: bool = True) -> GridField:
    """
    Sample the distance to `geometry` on a regular grid.

    Args:
        geometry: A PlanarSet or a BoxUnion
        margin: Largest eps that will be queried; the window is grown by it
        h: Requested spacing (default: fraction of the bounding-box diagonal)
        bounds: Optional window (lower, upper) replacing the set's bounding box
        config: Configuration with the cell budget
        threads: Worker threads used for the row blocks
        snap: Shrink h so flat edges fall on cell boundaries when possible

    Raises:
        OracleError: If the grid exceeds the configured cell budget
    """
    config = config or GausstailConfig()
    if isinstance(geometry, PlanarSet):
        dimension = 2
    elif isinstance(geometry, BoxUnion):
        dimension = 3
    else:
        raise OracleError(f"no distance available for {type(geometry).__name__}")
    if margin < 0:
        raise OracleError(f"margin must be non-negative, got {margin}")

    h = h or default_spacing(geometry, config)
    if not h > 0:
        raise OracleError(f"grid spacing must be positive, got {h}")

    set_lo, set_hi = _geometry_bounds(geometry)
    lo, hi = bounds if bounds is not None else (set_lo, set_hi)
    anchor = list(lo)
    if snap:
        coords = _lattice_coordinates(geometry)
        step = _lattice_step(coords) if coords else None
        if step is not None:
            h = step / math.ceil(step / h - 1e-9)
            anchor = list(set_lo)

    origin, dims = [], []
    for k in range(dimension):
        start = anchor[k] + math.floor((lo[k] - margin - anchor[k]) / h + 1e-9) * h
        count = math.ceil((hi[k] + margin - start) / h - 1e-9)
        origin.append(start)
        dims.append(max(count, 1))

    cells = math.prod(dims)
    if cells > config.oracle.max_cells:
        raise OracleError(f"grid of {cells} cells exceeds the budget of {config.oracle.max_cells}")

    axes = [origin[k] + (np.arange(dims[k]) + 0.5) * h for k in range(dimension)]
    rows = max(1, _CHUNK_CELLS // max(1, cells // dims[0]))
    blocks = [(start, min(start + rows, dims[0])) for start in range(0, dims[0], rows)]

    if dimension == 2:
        polygons = [c.region() for c in geometry.components if c.kind is ComponentKind.REGION]
        worker = lambda block: _planar_chunk(geometry, polygons, axes[0][block[0]:block[1]], axes[1])
    else:
        worker = lambda block: _box_chunk(geometry, axes[0][block[0]:block[1]], axes[1], axes[2])

    scheduler = BlockScheduler(worker, threads=threads, label="distance block")
    values = np.concatenate(scheduler.run_sync(blocks), axis=0)

    logger.debug(f"Distance field: dims {tuple(dims)}, h {h:.6g}")
    return GridField(origin=tuple(origin), h=h, dims=tuple(dims), values=values, margin=margin)


def shared_distance_fields(sets: Sequence[OracleGeometry], margin: float, h: Optional[float] = None,
                           bounds: Optional[Bounds] = None, config: Optional[GausstailConfig] = None,
                           threads: int = 1) -> List[GridField]:
    """Distance fields of several sets on one common grid."""
    if not sets:
        raise OracleError("need at least one set")
    if bounds is None:
        boxes = [_geometry_bounds(s) for s in sets]
        bounds = (tuple(np.min([b[0] for b in boxes], axis=0)), tuple(np.max([b[1] for b in boxes], axis=0)))
    h = h or min(default_spacing(s, config) for s in sets)
    return [distance_field(s, margin, h=h, bounds=bounds, config=config, threads=threads, snap=False)
            for s in sets]


def tube_volume(F: GridField, eps: float) -> float:
    """Measure of {t : dist(t, S) <= eps} by counting cell centers."""
    if eps > F.margin * (1.0 + 1e-12):
        raise OracleError(f"eps={eps} exceeds the grid margin {F.margin}")
    return np.count_nonzero(F.values <= eps) * F.cell_volume


def default_eps_grid(F: GridField, config: Optional[GausstailConfig] = None) -> List[float]:
    """Geometric eps grid in units of h, snapped to integer multiples of h."""
    settings = (config or GausstailConfig()).oracle
    if F.dimension == 2:
        low, high = settings.eps_min_cells_2d, settings.eps_max_cells_2d
    else:
        low, high = settings.eps_min_cells_3d, settings.eps_max_cells_3d
    cells = np.unique(np.round(np.geomspace(low, high, settings.eps_count)))
    return [float(c) * F.h for c in cells]


def fit_steiner(F: GridField, eps_grid: Sequence[float], dimension: Optional[int] = None,
                pin_constant: Optional[float] = None,
                config: Optional[GausstailConfig] = None) -> SteinerFit:
    """
    Fit tube_volume(eps) by a polynomial of degree `dimension`.

    Rows are weighted by 1/eps. With `pin_constant` the eps^0 term is fixed.

    Raises:
        OracleError: If the eps grid has fewer than 8 distinct values or
            spans less than the configured ratio
    """
    settings = (config or GausstailConfig()).oracle
    n = dimension or F.dimension
    eps = np.unique(np.asarray(eps_grid, dtype=float))
    if len(eps) < 8 or eps[0] <= 0 or eps[-1] / eps[0] < settings.min_eps_span:
        raise OracleError(
            f"ill-conditioned fit: need >= 8 positive eps spanning a factor {settings.min_eps_span}, "
            f"got {len(eps)} value(s)")

    volumes = np.array([tube_volume(F, e) for e in eps])
    design = np.vander(eps, n + 1, increasing=True)
    target = volumes.copy()
    if pin_constant is not None:
        target -= pin_constant
        design = design[:, 1:]

    weights = 1.0 / eps
    solution, *_ = np.linalg.lstsq(design * weights[:, None], target * weights, rcond=None)
    residual = float(np.sqrt(np.mean((design @ solution - target) ** 2)))
    coefficients = [pin_constant] + list(solution) if pin_constant is not None else list(solution)

    logger.info(f"Steiner fit ({n}D) on {len(eps)} radii: {', '.join(f'{c:.6g}' for c in coefficients)}")
    return SteinerFit(dimension=n, coefficients=tuple(float(c) for c in coefficients), residual=residual,
                      eps=list(map(float, eps)), volumes=list(map(float, volumes)),
                      pinned=pin_constant is not None)


def oracle_fit(geometry: OracleGeometry, config: Optional[GausstailConfig] = None, threads: int = 1,
               pin_constant: Optional[float] = None) -> SteinerFit:
    """Distance field at default resolution followed by fit_steiner on the default eps grid."""
    config = config or GausstailConfig()
    h = default_spacing(geometry, config)
    settings = config.oracle
    high = settings.eps_max_cells_2d if isinstance(geometry, PlanarSet) else settings.eps_max_cells_3d
    field = distance_field(geometry, margin=(high + 2.0) * h, h=h, config=config, threads=threads)
    return fit_steiner(field, default_eps_grid(field, config), pin_constant=pin_constant, config=config)


def intersection_tube_volume(fields: Sequence[GridField], eps: float) -> float:
    """Measure of the points within eps of every set."""
    if not fields:
        raise OracleError("need at least one field")
    first = fields[0]
    if any(not first.same_grid(f) for f in fields[1:]):
        raise OracleError("fields are not on a shared grid")
    for f in fields:
        if eps > f.margin * (1.0 + 1e-12):
            raise OracleError(f"eps={eps} exceeds the grid margin {f.margin}")
    inside = first.values <= eps
    for f in fields[1:]:
        inside &= f.values <= eps
    return np.count_nonzero(inside) * first.cell_volume


def estimate_intersection_constant(eps: Sequence[float], volumes: Sequence[float], n: int, d: float,
                                   tolerance: Optional[float] = None) -> IntersectionConstant:
    """
    Fit volume ~ C eps^(n - d).

    C is the mean of volume / eps^(n - d). When the ratio drifts with eps by
    more than `tolerance` (relative, across the eps range) a
    MixedOrderWarning is issued.
    """
    tolerance = tolerance if tolerance is not None else GausstailConfig().oracle.power_law_tolerance
    eps = np.asarray(eps, dtype=float)
    volumes = np.asarray(volumes, dtype=float)
    if len(eps) < 2 or len(eps) != len(volumes) or np.any(eps <= 0) or np.any(volumes <= 0):
        raise OracleError("need at least two positive (eps, volume) pairs")

    exponent = n - d
    ratios = volumes / eps ** exponent
    slope = float(np.polyfit(np.log(eps), np.log(ratios), 1)[0])
    drift = abs(slope) * math.log(eps.max() / eps.min())
    mixed = drift > tolerance
    if mixed:
        message = f"volume is not a pure eps^{exponent:g} law: ratio drifts by {drift:.3g} (slope {slope:.3g})"
        logger.warning(message)
        warnings.warn(message, MixedOrderWarning, stacklevel=2)

    return IntersectionConstant(constant=float(np.mean(ratios)), exponent=exponent, slope=slope,
                                drift=drift, mixed_order=mixed, ratios=list(map(float, ratios)))


def dump_field(F: GridField, path: Union[str, Path]) -> Path:
    """Write values as little-endian float32 with a JSON sidecar {origin, h, dims}."""
    path = Path(path)
    F.values.astype("<f4").tofile(path)
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps({"origin": list(F.origin), "h": F.h, "dims": list(F.dims)}), encoding="utf-8")
    logger.info(f"Field written to {path}")
    return sidecar


def intersection_volumes(sets: Sequence[OracleGeometry], window: Bounds, eps_grid: Sequence[float],
                         h: float, config: Optional[GausstailConfig] = None, threads: int = 1) -> List[float]:
    """
    Intersection-tube volumes measured on `window` = (lower, upper).

    The window is grown by max(eps_grid) plus two cells, so only the part of
    the intersection near the window is measured. A point window (c, c)
    isolates the intersection near c.
    """
    margin = (math.ceil(max(eps_grid) / h) + 2) * h
    bounds = (tuple(window[0]), tuple(window[1]))
    fields = shared_distance_fields(sets, margin, h=h, bounds=bounds, config=config, threads=threads)
    return [intersection_tube_volume(fields, eps) for eps in eps_grid]
