"""
Special-function kernels shared by the expansions.
"""
import math

import numpy as np
from scipy import special

SQRT_2PI = math.sqrt(2.0 * math.pi)


class ExpansionError(ValueError):
    """Exception raised when an expansion is evaluated outside its domain."""
    pass


def gaussian_kernels(u):
    """
    Standard normal tail and density at u.

    The tail goes through erfc, never 1 - Phi, so it keeps full relative
    precision far into the tail. Works on scalars and arrays.

    Args:
        u: Level (float or array)

    Returns:
        Tuple (Phi_bar(u), phi(u))
    """
    u_arr = np.asarray(u, dtype=float)
    tail = 0.5 * special.erfc(u_arr / math.sqrt(2.0))
    density = np.exp(-0.5 * u_arr * u_arr) / SQRT_2PI
    if u_arr.ndim == 0:
        return float(tail), float(density)
    return tail, density


def normal_cdf(u):
    """Phi(u), via erfc so the lower tail stays accurate."""
    u_arr = np.asarray(u, dtype=float)
    value = 0.5 * special.erfc(-u_arr / math.sqrt(2.0))
    return float(value) if u_arr.ndim == 0 else value


def gamma_function(x: float) -> float:
    """Gamma function for x > 0."""
    if not x > 0:
        raise ExpansionError(f"gamma_function requires x > 0, got {x}")
    return float(special.gamma(x))
