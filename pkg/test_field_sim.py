"""
Tests for the random-wave field and the excursion diagnostics.
"""
import math

import numpy as np
import pytest
from scipy import special

from simulation.diagnostics import excursion_diagnostics, sandwich_radii
from simulation.field import (
    DEFAULT_WAVES, RandomWaveField, SimulationError, covariance, design_matrices, draw_coefficients, evaluate,
    make_field, wave_vectors,
)
from simulation.montecarlo import replicate_maxima


def peak_field(centers, height, K=DEFAULT_WAVES):
    """A field equal to the sum of height * rho(t - a) over the centers a."""
    lam = wave_vectors(K)
    xi, eta = np.zeros(K), np.zeros(K)
    scale = height / math.sqrt(K)
    for a in centers:
        phase = lam @ np.asarray(a, dtype=float)
        xi += scale * np.cos(phase)
        eta += scale * np.sin(phase)
    return RandomWaveField(K=K, xi=xi, eta=eta)


def test_wave_vectors_moments():
    lam = wave_vectors()
    assert lam.shape == (66, 2)
    assert np.hypot(lam[:, 0], lam[:, 1]) == pytest.approx(np.full(66, math.sqrt(2.0)))
    # gradient covariance is the identity, Var(d2X/dt1^2) = 3/2
    assert np.mean(lam[:, 0] ** 2) == pytest.approx(1.0)
    assert np.mean(lam[:, 0] * lam[:, 1]) == pytest.approx(0.0, abs=1e-15)
    assert np.mean(lam[:, 0] ** 4) == pytest.approx(1.5)


def test_covariance():
    assert covariance((0.0, 0.0)) == pytest.approx(1.0)
    h = np.array([[0.3, -0.2], [-0.3, 0.2]])
    values = covariance(h)
    assert values[0] == pytest.approx(values[1])
    step = 1e-4
    second = (covariance((step, 0.0)) - 2.0 + covariance((-step, 0.0))) / step ** 2
    assert second == pytest.approx(-1.0, rel=1e-4)


def test_replicate_streams_are_deterministic():
    a = draw_coefficients(7, 3)
    b = draw_coefficients(7, 3)
    c = draw_coefficients(7, 4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[0], c[0])
    field = make_field(7, 3)
    assert np.array_equal(field.xi, a[0])


def test_value_matches_design_matrices():
    field = make_field(11, 0)
    points = np.random.default_rng(0).uniform(-1.0, 1.0, size=(20, 2))
    C, S = design_matrices(points)
    assert C @ field.xi + S @ field.eta == pytest.approx(field.value(points), rel=1e-12, abs=1e-12)


def test_derivatives_match_finite_differences():
    field = make_field(5, 2)
    t = np.array([0.2, -0.4])
    step = 1e-5
    value, gradient, hessian = evaluate(field, t)
    assert value == pytest.approx(float(field.value(t)))
    for i in range(2):
        e = np.zeros(2)
        e[i] = step
        numeric = (field.value(t + e) - field.value(t - e)) / (2.0 * step)
        assert gradient[i] == pytest.approx(numeric, abs=1e-6)
        numeric_row = (field.gradient(t + e) - field.gradient(t - e)) / (2.0 * step)
        assert hessian[i] == pytest.approx(numeric_row, abs=1e-5)
    assert hessian == pytest.approx(hessian.T)


def test_unit_variance():
    values = replicate_maxima([np.array([[0.3, 0.2]])], 4000, seed=1, threads=1)[:, 0]
    assert values.mean() == pytest.approx(0.0, abs=0.07)
    assert values.var() == pytest.approx(1.0, abs=0.1)


def lags(radii, directions=24):
    angles = np.linspace(0.0, math.pi, directions, endpoint=False)
    r, a = np.meshgrid(radii, angles)
    return r.ravel(), np.column_stack(((r * np.cos(a)).ravel(), (r * np.sin(a)).ravel()))


def test_covariance_close_to_isotropic_limit():
    r, h = lags(np.linspace(0.0, 2.0, 81))
    assert np.max(np.abs(covariance(h) - special.j0(math.sqrt(2.0) * r))) <= 1e-3


def test_covariance_does_not_recur_inside_domain():
    _, h = lags(np.linspace(0.5, 4.0, 351))
    assert np.max(np.abs(covariance(h))) < 0.9


def test_derivative_variances():
    t = np.array([0.4, -0.1])
    first, second = [], []
    for replicate in range(4000):
        _, gradient, hessian = evaluate(make_field(13, replicate), t)
        first.append(gradient[0])
        second.append(hessian[0, 0])
    assert np.var(first) == pytest.approx(1.0, abs=0.1)
    assert np.var(second) == pytest.approx(1.5, abs=0.15)


def test_invalid_parameters():
    with pytest.raises(SimulationError):
        wave_vectors(3)
    with pytest.raises(SimulationError):
        draw_coefficients(-1, 0)


def test_peak_field_shape():
    field = peak_field([(0.0, 0.0)], 3.5)
    value, gradient, hessian = evaluate(field, np.zeros(2))
    assert value == pytest.approx(3.5)
    assert gradient == pytest.approx(np.zeros(2), abs=1e-12)
    assert hessian == pytest.approx(-3.5 * np.eye(2), abs=1e-12)


def test_sandwich_radii():
    assert sandwich_radii(3.0, 3.0, 0.4) == (0.0, 0.0)
    lower, upper = sandwich_radii(3.5, 3.0, 0.4)
    assert lower == pytest.approx(math.sqrt(1.0 / (3.5 + 3.0 ** 0.4)))
    assert upper == pytest.approx(math.sqrt(1.0 / (3.0 - 3.0 ** 0.4)))
    with pytest.raises(SimulationError):
        sandwich_radii(1.5, 1.0, 0.4)


def test_single_peak_passes_every_check():
    record = excursion_diagnostics(peak_field([(0.0, 0.0)], 3.5), (0.0, 0.0), 1.0, 3.0)
    assert len(record.maxima) == 1
    x, y, value = record.maxima[0]
    assert (x, y) == pytest.approx((0.0, 0.0), abs=1e-9)
    assert value == pytest.approx(3.5)
    assert not (record.a1 or record.a2 or record.a3 or record.a4)
    assert record.r_lower < record.r_upper
    assert record.sandwich_ok
    counts = record.counts()
    assert counts.single_maximum == 1 and counts.sandwich_failures == 0


def test_high_peak_flags_a1():
    record = excursion_diagnostics(peak_field([(0.0, 0.0)], 4.5), (0.0, 0.0), 1.0, 3.0)
    assert record.a1
    assert record.counts().a1 == 1


def test_two_peaks_flag_a2():
    # each peak sits where the other's covariance lobe is flat, so both stay local maxima
    record = excursion_diagnostics(peak_field([(-1.355, 0.0), (1.355, 0.0)], 5.8), (0.0, 0.0), 2.0, 3.0)
    assert record.a2
    assert len(record.maxima) == 2
    assert record.sandwich_ok is None
    assert record.counts().single_maximum == 0


def test_no_excursion():
    record = excursion_diagnostics(peak_field([(0.0, 0.0)], 2.0), (0.0, 0.0), 1.0, 3.0)
    assert record.maxima == []
    assert record.counts().examined == 1


@pytest.mark.parametrize("kwargs", [{"alpha": 1.2}, {"beta": 0.2}, {"u": 0.5}, {"radius": 0.0}])
def test_diagnostics_parameter_checks(kwargs):
    arguments = {"field": peak_field([(0.0, 0.0)], 3.5), "center": (0.0, 0.0), "radius": 1.0, "u": 3.0}
    arguments.update(kwargs)
    with pytest.raises(SimulationError):
        excursion_diagnostics(**arguments)
