"""
Crude Monte Carlo estimates of exceedance probabilities of the random-wave
field maximum over discretized planar sets.

Replicates are processed in fixed-size blocks on worker threads. Each
replicate draws its coefficients from its own counter-based stream, so the
estimates do not depend on the number of threads.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict

from core.config import GausstailConfig, worker_threads
from core.manager import BlockScheduler
from core.models import DiagnosticCounts, MCEstimate
from geometry.planar import ComponentKind, PlanarSet
from simulation.diagnostics import excursion_diagnostics
from simulation.field import DomainSizeError, SimulationError, design_matrices, draw_coefficients, make_field


logger = logging.getLogger(__name__)

# points per matrix product inside a block
_POINT_CHUNK = 2048


class RefinementRow(BaseModel):
    """Sensitivity of one level to halving the grid spacing."""
    model_config = ConfigDict(frozen=True)

    u: float
    p_coarse: float
    p_fine: float
    z_score: float


def discretize(S: PlanarSet, h_curve: float, h_interior: float) -> np.ndarray:
    """
    Sample points of S: an interior lattice at spacing h_interior plus
    every loop, whisker and curve at arc-length step h_curve. Vertices are
    always included.
    """
    if not h_curve > 0 or not h_interior > 0:
        raise SimulationError("grid spacings must be positive")
    parts = []
    for component in S.components:
        if component.kind is ComponentKind.POINT:
            parts.append(np.array([component.point], dtype=float))
            continue
        for edge in component.edges():
            parts.append(edge.sample(h_curve))
        if component.kind is ComponentKind.REGION:
            x0, y0, x1, y1 = component.bounds()
            X, Y = np.meshgrid(np.arange(x0, x1 + 0.5 * h_interior, h_interior),
                               np.arange(y0, y1 + 0.5 * h_interior, h_interior), indexing="ij")
            inside = shapely.contains_xy(component.region(), X, Y)
            parts.append(np.column_stack((X[inside], Y[inside])))
    return np.unique(np.vstack(parts), axis=0)


def _check_domain(sets: Sequence[PlanarSet], config: GausstailConfig):
    boxes = np.array([s.bounds() for s in sets])
    diagonal = math.hypot(boxes[:, 2].max() - boxes[:, 0].min(), boxes[:, 3].max() - boxes[:, 1].min())
    limit = config.simulation.max_domain_diameter
    if diagonal > limit:
        raise DomainSizeError(f"domain diameter {diagonal:.6g} exceeds {limit:g}: covariance not reliable")


def _spacings(h: Optional[float], config: GausstailConfig) -> Tuple[float, float]:
    if h is None:
        return config.simulation.h_curve, config.simulation.h_interior
    if not h > 0:
        raise SimulationError(f"grid spacing must be positive, got {h}")
    return h, h


def replicate_maxima(point_sets: Sequence[np.ndarray], replicates: int, seed: int,
                     config: Optional[GausstailConfig] = None,
                     threads: Optional[int] = None) -> np.ndarray:
    """
    Maximum of the field over each point set, for replicates 0..N-1.

    Returns:
        Array of shape (replicates, len(point_sets))
    """
    config = config or GausstailConfig()
    if replicates < 1:
        raise SimulationError(f"need at least one replicate, got {replicates}")
    K = config.simulation.waves
    matrices = [design_matrices(points, K) for points in point_sets]
    size = config.simulation.block_size
    blocks = [(start, min(start + size, replicates)) for start in range(0, replicates, size)]

    def _block(block: Tuple[int, int]) -> np.ndarray:
        draws = [draw_coefficients(seed, r, K) for r in range(*block)]
        xi = np.column_stack([d[0] for d in draws])
        eta = np.column_stack([d[1] for d in draws])
        maxima = np.empty((block[1] - block[0], len(matrices)))
        for index, (C, S) in enumerate(matrices):
            running = np.full(block[1] - block[0], -np.inf)
            for start in range(0, C.shape[0], _POINT_CHUNK):
                values = C[start:start + _POINT_CHUNK] @ xi + S[start:start + _POINT_CHUNK] @ eta
                np.maximum(running, values.max(axis=0), out=running)
            maxima[:, index] = running
        return maxima

    scheduler = BlockScheduler(_block, threads=threads or worker_threads(config), label="replicate block")
    return np.vstack(scheduler.run_sync(blocks))


def _diagnose(S: PlanarSet, maxima: np.ndarray, u: float, seed: int, config: GausstailConfig) -> DiagnosticCounts:
    x0, y0, x1, y1 = S.bounds()
    center = ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    radius = max(0.5 * math.hypot(x1 - x0, y1 - y0), config.diagnostics.grid_h)
    counts = DiagnosticCounts()
    settings = config.diagnostics
    for replicate in np.nonzero(maxima >= u)[0][:config.simulation.diagnostics_cap]:
        field = make_field(seed, int(replicate), config.simulation.waves)
        record = excursion_diagnostics(field, center, radius, u, alpha=settings.alpha, beta=settings.beta,
                                       grid_h=settings.grid_h, directions=settings.directions)
        counts = counts.merge(record.counts())
    if counts.single_maximum and counts.sandwich_failures:
        logger.warning(f"u={u:g}: ball sandwich failed in {counts.sandwich_failures}/{counts.single_maximum} replicate(s)")
    return counts


def estimate_exceedance(S: PlanarSet, levels: Sequence[float], replicates: int, h: Optional[float] = None,
                        seed: int = 0, config: Optional[GausstailConfig] = None, threads: Optional[int] = None,
                        diagnostics: bool = False) -> List[MCEstimate]:
    """
    Estimate P(max over S of X >= u) for each level.

    Args:
        S: Planar set, contained in a box of diagonal <= max_domain_diameter
        levels: Levels u
        replicates: Number of field realizations N
        h: Spacing on curves and interiors (default from config)
        seed: Stream key
        diagnostics: Run excursion diagnostics on exceeding replicates with u > 1

    Raises:
        DomainSizeError: If S is too large for the field
    """
    config = config or GausstailConfig()
    _check_domain([S], config)
    h_curve, h_interior = _spacings(h, config)
    points = discretize(S, h_curve, h_interior)
    logger.info(f"Simulating {replicates} replicate(s) over {len(points)} point(s)")
    maxima = replicate_maxima([points], replicates, seed, config, threads)[:, 0]

    estimates = []
    for u in levels:
        hits = int(np.count_nonzero(maxima >= u))
        counts = _diagnose(S, maxima, u, seed, config) if diagnostics and u > 1.0 else None
        estimates.append(MCEstimate.from_hits(u=float(u), hits=hits, replicates=replicates,
                                              grid_h=h_curve, diagnostics=counts))
    return estimates


def estimate_joint_exceedance(sets: Sequence[PlanarSet], u: float, replicates: int, h: Optional[float] = None,
                              seed: int = 0, config: Optional[GausstailConfig] = None,
                              threads: Optional[int] = None) -> MCEstimate:
    """Estimate P(every set's maximum >= u) with the same replicate streams as estimate_exceedance."""
    if not sets:
        raise SimulationError("need at least one set")
    config = config or GausstailConfig()
    _check_domain(sets, config)
    h_curve, h_interior = _spacings(h, config)
    point_sets = [discretize(S, h_curve, h_interior) for S in sets]
    maxima = replicate_maxima(point_sets, replicates, seed, config, threads)
    hits = int(np.count_nonzero(np.all(maxima >= u, axis=1)))
    return MCEstimate.from_hits(u=float(u), hits=hits, replicates=replicates, grid_h=h_curve)


def refinement_check(S: PlanarSet, estimates: Sequence[MCEstimate], h: Optional[float] = None, seed: int = 0,
                     config: Optional[GausstailConfig] = None,
                     threads: Optional[int] = None) -> List[RefinementRow]:
    """
    Rerun at half the spacing with a fraction of the replicates and report
    the difference per level in units of the combined standard error.

    `h` is the spacing the estimates were made with (None for the
    configured curve and interior spacings); both spacings are halved.
    """
    if not estimates:
        return []
    config = config or GausstailConfig()
    h_curve, h_interior = _spacings(h, config)
    simulation = config.simulation.model_copy(update={"h_curve": h_curve / 2.0, "h_interior": h_interior / 2.0})
    fine_config = config.model_copy(update={"simulation": simulation})
    replicates = max(1, round(config.simulation.refinement_fraction * estimates[0].replicates))
    fine = estimate_exceedance(S, [e.u for e in estimates], replicates, seed=seed, config=fine_config,
                               threads=threads)
    rows = []
    for coarse, refined in zip(estimates, fine):
        spread = math.hypot(coarse.standard_error, refined.standard_error)
        z = (refined.p_hat - coarse.p_hat) / spread if spread > 0 else 0.0
        if abs(z) > 3.0:
            logger.warning(f"u={coarse.u:g}: halving h moves the estimate by {z:.2f} standard errors")
        rows.append(RefinementRow(u=coarse.u, p_coarse=coarse.p_hat, p_fine=refined.p_hat, z_score=z))
    return rows
