"""
Tail expansions of the maximum of a stationary unit-variance Gaussian field.

Every expansion returns an ExpansionResult with one term per coefficient so
that callers can compare term by term.
"""
import math

import numpy as np

from core.models import Basis, ExpansionResult, ExpansionTerm, SteinerCoeffs2D, SteinerCoeffs3D
from expansion.kernels import SQRT_2PI, ExpansionError, gamma_function, gaussian_kernels, normal_cdf
from geometry.polytope import dihedral_subtraction_constant


def _term(name: str, coefficient: float, basis: Basis, basis_value: float) -> ExpansionTerm:
    return ExpansionTerm(name=name, coefficient=coefficient, basis=basis, basis_value=basis_value,
                         product=coefficient * basis_value)


def _check_level(u: float, lower: float = 0.0):
    if not math.isfinite(u) or u <= lower:
        raise ExpansionError(f"level u must be finite and > {lower:g}, got {u}")


def sfh_expansion_2d(c: SteinerCoeffs2D, u: float) -> ExpansionResult:
    """L0 Phi_bar(u) + L1 phi(u) / (2 sqrt(2 pi)) + sigma2 u phi(u) / (2 pi)."""
    _check_level(u)
    tail, density = gaussian_kernels(u)
    return ExpansionResult.from_terms(u, [
        _term("L0", c.L0, Basis.TAIL, tail),
        _term("L1", c.L1 / (2.0 * SQRT_2PI), Basis.DENSITY, density),
        _term("sigma2", c.sigma2 / (2.0 * math.pi), Basis.U_DENSITY, u * density),
    ])


def convex_expansion_2d(perimeter: float, area: float, u: float) -> ExpansionResult:
    """Expansion of a convex body: the Euler characteristic is 1."""
    return sfh_expansion_2d(SteinerCoeffs2D(sigma2=area, L1=perimeter, L0=1.0), u)


def expansion_3d(c: SteinerCoeffs3D, u: float) -> ExpansionResult:
    """
    L1 phi/(2 sqrt(2 pi)) + L2 u phi/(2 pi) + L3 (u^2 - 1) phi/(2 pi)^(3/2).

    There is no Phi_bar term: its coefficient is not determined for sets
    that are not locally convex.
    """
    _check_level(u, lower=1.0)
    _, density = gaussian_kernels(u)
    return ExpansionResult.from_terms(u, [
        _term("L1", c.L1 / (2.0 * SQRT_2PI), Basis.DENSITY, density),
        _term("L2", c.L2 / (2.0 * math.pi), Basis.U_DENSITY, u * density),
        _term("L3", c.L3 / (2.0 * math.pi) ** 1.5, Basis.HERMITE2, (u * u - 1.0) * density),
    ])


def joint_exceedance_asymptotic(C: float, d: float, n: int, u: float) -> float:
    """
    Leading term of P(every set exceeds u) when the eps-tubes of the sets
    intersect in a volume C eps^(n - d):

        u^(d-1) phi(u) C Gamma(1 + (n - d)/2) / (2^(d/2) pi^(n/2))
    """
    if not 0.0 <= d < n:
        raise ExpansionError(f"need 0 <= d < n, got d={d}, n={n}")
    if not C > 0:
        raise ExpansionError(f"intersection constant must be positive, got {C}")
    _check_level(u)
    _, density = gaussian_kernels(u)
    scale = C * gamma_function(1.0 + (n - d) / 2.0) / (2.0 ** (d / 2.0) * math.pi ** (n / 2.0))
    return u ** (d - 1.0) * density * scale


def tangent_pair_coefficient(R: float) -> float:
    """8 sqrt(R) Gamma(7/4) / (2^(1/4) 3 pi); about 0.656 at R = 1."""
    if not R > 0:
        raise ExpansionError(f"radius must be positive, got {R}")
    return 8.0 * math.sqrt(R) * gamma_function(1.75) / (2.0 ** 0.25 * 3.0 * math.pi)


def tangent_pair_expansion(R: float, len1: float, len2: float, u: float) -> ExpansionResult:
    """
    Expansion for an arc of radius R and a segment meeting it tangentially:
    3/2 Phi_bar(u) - k u^(-1/2) phi(u) + (len1 + len2) phi(u) / sqrt(2 pi).
    """
    _check_level(u)
    k = tangent_pair_coefficient(R)
    tail, density = gaussian_kernels(u)
    return ExpansionResult.from_terms(u, [
        _term("tail", 1.5, Basis.TAIL, tail),
        _term("tangent", -k, Basis.ROOT_DENSITY, density / math.sqrt(u)),
        _term("length", (len1 + len2) / SQRT_2PI, Basis.DENSITY, density),
    ])


def tangent_joint_expansion(R: float, u: float) -> ExpansionResult:
    """Joint exceedance of the tangent pair: Phi_bar(u)/2 + k u^(-1/2) phi(u)."""
    _check_level(u)
    k = tangent_pair_coefficient(R)
    tail, density = gaussian_kernels(u)
    return ExpansionResult.from_terms(u, [
        _term("tail", 0.5, Basis.TAIL, tail),
        _term("tangent", k, Basis.ROOT_DENSITY, density / math.sqrt(u)),
    ])


def euler_density_2d(chi: float, sigma1: float, sigma2: float, x):
    """
    Density chi phi(x) + sigma1 x phi(x)/(2 sqrt(2 pi)) + sigma2 (x^2 - 1) phi(x)/(2 pi).

    Its integral over [u, inf) is the expansion with L0 = chi and L1 = sigma1.
    """
    if sigma1 < 0 or sigma2 < 0:
        raise ExpansionError("sigma1 and sigma2 must be non-negative")
    x_arr = np.asarray(x, dtype=float)
    _, density = gaussian_kernels(x_arr)
    value = density * (chi + sigma1 * x_arr / (2.0 * SQRT_2PI) + sigma2 * (x_arr * x_arr - 1.0) / (2.0 * math.pi))
    return float(value) if x_arr.ndim == 0 else value


def polygon_upper_bound(sigma1: float, sigma2: float, c: float, u: float) -> float:
    """
    Upper bound for a convex polygon:
    Phi_bar(u) + sigma1 phi(u)/(2 sqrt(2 pi)) + sigma2 [c phi(u/c) + u Phi(u/c)] phi(u)/(2 pi).

    c is sqrt(Var(d2X/dt1^2) - 1); sqrt(1/2) for the random-wave field.
    """
    if not c > 0:
        raise ExpansionError(f"c must be positive, got {c}")
    _check_level(u)
    tail, density = gaussian_kernels(u)
    _, scaled_density = gaussian_kernels(u / c)
    bracket = c * scaled_density + u * normal_cdf(u / c)
    return tail + sigma1 * density / (2.0 * SQRT_2PI) + sigma2 * bracket * density / (2.0 * math.pi)


def dihedral_expansion(area1: float, area2: float, perimeter1: float, perimeter2: float,
                       shared: float, alpha: float, u: float) -> ExpansionResult:
    """
    Two flat rectangles S1, S2 in space sharing an edge of length `shared`
    at dihedral angle alpha.

    The edge term is [perimeter1 + perimeter2 - shared * const(alpha)] phi(u)/(2 sqrt(2 pi))
    and the area term [area1 + area2] u phi(u)/(2 pi).
    """
    constant = dihedral_subtraction_constant(alpha)
    _check_level(u)
    _, density = gaussian_kernels(u)
    edges = perimeter1 + perimeter2 - shared * constant
    return ExpansionResult.from_terms(u, [
        _term("edges", edges / (2.0 * SQRT_2PI), Basis.DENSITY, density),
        _term("area", (area1 + area2) / (2.0 * math.pi), Basis.U_DENSITY, u * density),
    ])


def rice_segment_bound(length: float, u: float) -> float:
    """Rice bound on a segment for a unit-speed process: Phi_bar(u) + length phi(u)/sqrt(2 pi)."""
    if length < 0:
        raise ExpansionError(f"length must be non-negative, got {length}")
    tail, density = gaussian_kernels(u)
    return tail + length * density / SQRT_2PI
