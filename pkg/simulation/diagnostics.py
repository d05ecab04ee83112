"""
Excursion-set diagnostics on a ball around the set.

Flags the negligible events of the local-maximum argument:

    A1  a local maximum with value >= u + 1
    A2  two or more local maxima with value >= u
    A3  a maximum t with u < X(t) < u + 1 where some directional second
        derivative on B(t, u^-beta) is <= -X(t) - u^alpha
    A4  the same with some directional second derivative >= -X(t) + u^alpha

and, when exactly one maximum exceeds u, checks that the excursion set lies
between the balls of radius r_lower and r_upper around it.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from core.models import DiagnosticCounts
from simulation.field import RandomWaveField, SimulationError


logger = logging.getLogger(__name__)

# radii sampled along each direction inside B(t, u^-beta)
_RADIAL_STEPS = 8


class ExcursionDiagnostics(BaseModel):
    """Diagnostic record of one field realization at one level."""
    model_config = ConfigDict(frozen=True)

    u: float
    maxima: List[Tuple[float, float, float]]    # (x, y, value) of grid maxima >= u
    a1: bool
    a2: bool
    a3: bool
    a4: bool
    r_lower: Optional[float] = None
    r_upper: Optional[float] = None
    sandwich_ok: Optional[bool] = None

    def counts(self) -> DiagnosticCounts:
        single = len(self.maxima) == 1
        return DiagnosticCounts(
            examined=1,
            a1=int(self.a1),
            a2=int(self.a2),
            a3=int(self.a3),
            a4=int(self.a4),
            single_maximum=int(single),
            sandwich_failures=int(single and self.sandwich_ok is False),
        )


def sandwich_radii(value: float, u: float, alpha: float) -> Tuple[float, float]:
    """
    (r_lower, r_upper) for a maximum of height `value` >= u:

        r_upper = sqrt(2 (X - u) / (u - u^alpha))
        r_lower = sqrt(2 (X - u) / (X + u^alpha))
    """
    if u <= 1.0:
        raise SimulationError(f"sandwich radii need u > 1, got {u}")
    excess = max(value - u, 0.0)
    return (math.sqrt(2.0 * excess / (value + u ** alpha)),
            math.sqrt(2.0 * excess / (u - u ** alpha)))


def _directional_extremes(field: RandomWaveField, t: np.ndarray, radius: float,
                          directions: int) -> Tuple[float, float]:
    """Min and max of gamma' X''(s) gamma for s = t + r gamma, 0 < r <= radius."""
    angles = 2.0 * np.pi * np.arange(directions) / directions
    gammas = np.column_stack((np.cos(angles), np.sin(angles)))
    radii = radius * np.arange(1, _RADIAL_STEPS + 1) / _RADIAL_STEPS
    points = t + radii[:, None, None] * gammas[None, :, :]
    forms = np.einsum("di,rdij,dj->rd", gammas, field.hessian(points), gammas)
    return float(forms.min()), float(forms.max())


def excursion_diagnostics(field: RandomWaveField, center, radius: float, u: float,
                          alpha: float = 0.4, beta: float = 0.4, grid_h: float = 0.02,
                          directions: int = 16) -> ExcursionDiagnostics:
    """
    Evaluate the negligible events on a grid over the ball B(center, radius).

    Local maxima are grid points not smaller than their 8 neighbors; cells
    outside the ball count as -inf so border points compare with the
    neighbors they have.

    Raises:
        SimulationError: If 0 < alpha < 1, beta > (1 - alpha)/2 or u > 1 fails
    """
    if not 0.0 < alpha < 1.0:
        raise SimulationError(f"alpha must lie in (0, 1), got {alpha}")
    if beta <= (1.0 - alpha) / 2.0:
        raise SimulationError(f"beta={beta} must exceed (1 - alpha)/2 = {(1.0 - alpha) / 2.0}")
    if u <= 1.0:
        raise SimulationError(f"diagnostics need u > 1, got {u}")
    if not radius > 0 or not grid_h > 0:
        raise SimulationError("radius and grid spacing must be positive")

    center = np.asarray(center, dtype=float)
    offsets = np.arange(-radius, radius + 0.5 * grid_h, grid_h)
    X, Y = np.meshgrid(center[0] + offsets, center[1] + offsets, indexing="ij")
    points = np.stack((X, Y), axis=-1)
    inside = np.hypot(X - center[0], Y - center[1]) <= radius

    values = np.where(inside, field.value(points), -np.inf)
    peaks = ndimage.maximum_filter(values, size=3, mode="constant", cval=-np.inf) == values
    peaks &= inside & (values >= u)
    peak_index = np.argwhere(peaks)
    maxima = [(float(X[i, j]), float(Y[i, j]), float(values[i, j])) for i, j in peak_index]

    a1 = bool(np.any(values[peaks] >= u + 1.0))
    a2 = len(maxima) >= 2

    a3 = a4 = False
    reach = u ** (-beta)
    for x, y, value in maxima:
        if not u < value < u + 1.0:
            continue
        low, high = _directional_extremes(field, np.array([x, y]), reach, directions)
        a3 |= low <= -value - u ** alpha
        a4 |= high >= -value + u ** alpha

    r_lower = r_upper = sandwich_ok = None
    if len(maxima) == 1:
        x, y, value = maxima[0]
        r_lower, r_upper = sandwich_radii(value, u, alpha)
        distance = np.hypot(X - x, Y - y)
        excursion = inside & (values >= u)
        inner = inside & (distance <= r_lower)
        sandwich_ok = bool(np.all(excursion[inner]) and np.all(distance[excursion] <= r_upper))

    return ExcursionDiagnostics(u=u, maxima=maxima, a1=a1, a2=a2, a3=bool(a3), a4=bool(a4),
                                r_lower=r_lower, r_upper=r_upper, sandwich_ok=sandwich_ok)
