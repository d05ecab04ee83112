"""
Random-wave field: an exactly Gaussian stationary field on the plane.

    X(t) = K^(-1/2) sum_k [xi_k cos(lambda_k . t) + eta_k sin(lambda_k . t)]

with K equally spaced wave vectors of norm sqrt(2). X has unit variance,
identity gradient covariance and Var(d2X/dt1^2) = 3/2.
"""
import logging
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


logger = logging.getLogger(__name__)

DEFAULT_WAVES = 66


class SimulationError(ValueError):
    """Exception raised for invalid simulation parameters."""
    pass


class DomainSizeError(SimulationError):
    """The domain is too large for the field's covariance to be trusted."""
    pass


def _check_waves(K: int):
    if K < 5:
        raise SimulationError(f"need at least 5 wave directions, got {K}")


def wave_vectors(K: int = DEFAULT_WAVES) -> np.ndarray:
    """lambda_k = sqrt(2) (cos 2 pi k/K, sin 2 pi k/K), shape (K, 2)."""
    _check_waves(K)
    angles = 2.0 * np.pi * np.arange(K) / K
    return math.sqrt(2.0) * np.column_stack((np.cos(angles), np.sin(angles)))


def replicate_generator(seed: int, replicate: int) -> np.random.Generator:
    """Counter-based stream of replicate `replicate` under `seed`."""
    if seed < 0 or replicate < 0:
        raise SimulationError("seed and replicate index must be non-negative")
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, replicate]))


def draw_coefficients(seed: int, replicate: int, K: int = DEFAULT_WAVES) -> Tuple[np.ndarray, np.ndarray]:
    """(xi, eta) of one replicate; depends only on (seed, replicate, K)."""
    draws = replicate_generator(seed, replicate).standard_normal(2 * K)
    return draws[:K], draws[K:]


def design_matrices(points: np.ndarray, K: int = DEFAULT_WAVES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Matrices (C, S) of shape (P, K) with values = C @ xi + S @ eta.

    The 1/sqrt(K) normalization is folded in.
    """
    phase = np.asarray(points, dtype=float) @ wave_vectors(K).T
    scale = 1.0 / math.sqrt(K)
    return np.cos(phase) * scale, np.sin(phase) * scale


class RandomWaveField(BaseModel):
    """One realization of the random-wave field."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    K: int = Field(ge=5)
    xi: np.ndarray
    eta: np.ndarray
    seed: int = 0
    replicate: int = 0

    @property
    def waves(self) -> np.ndarray:
        return wave_vectors(self.K)

    def _phases(self, t) -> Tuple[np.ndarray, np.ndarray]:
        phase = np.asarray(t, dtype=float) @ self.waves.T
        return np.cos(phase), np.sin(phase)

    def value(self, t) -> np.ndarray:
        """X at points t (last axis of size 2)."""
        c, s = self._phases(t)
        return (c @ self.xi + s @ self.eta) / math.sqrt(self.K)

    def gradient(self, t) -> np.ndarray:
        c, s = self._phases(t)
        return ((-s * self.xi + c * self.eta) @ self.waves) / math.sqrt(self.K)

    def hessian(self, t) -> np.ndarray:
        c, s = self._phases(t)
        lam = self.waves
        return -np.einsum("...k,ki,kj->...ij", c * self.xi + s * self.eta, lam, lam) / math.sqrt(self.K)


def make_field(seed: int, replicate: int, K: int = DEFAULT_WAVES) -> RandomWaveField:
    """Field of replicate `replicate`; the Monte Carlo engine draws the same coefficients."""
    _check_waves(K)
    xi, eta = draw_coefficients(seed, replicate, K)
    return RandomWaveField(K=K, xi=xi, eta=eta, seed=seed, replicate=replicate)


def covariance(h, K: int = DEFAULT_WAVES):
    """rho(h) = (1/K) sum_k cos(lambda_k . h), exactly E[X(t) X(t + h)]."""
    h_arr = np.asarray(h, dtype=float)
    rho = np.cos(h_arr @ wave_vectors(K).T).mean(axis=-1)
    return float(rho) if rho.ndim == 0 else rho


def evaluate(field: RandomWaveField, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(value, gradient, Hessian) at t, all analytic."""
    c, s = field._phases(t)
    lam = field.waves
    scale = 1.0 / math.sqrt(field.K)
    value = (c @ field.xi + s @ field.eta) * scale
    gradient = ((-s * field.xi + c * field.eta) @ lam) * scale
    hessian = -np.einsum("...k,ki,kj->...ij", c * field.xi + s * field.eta, lam, lam) * scale
    if np.ndim(value) == 0:
        value = float(value)
    return value, gradient, hessian
