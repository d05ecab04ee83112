"""
Tests for the Monte Carlo exceedance estimates.
"""
import math

import numpy as np
import pytest

from core.config import GausstailConfig, SimulationSettings
from core.models import MCEstimate
from expansion.kernels import gaussian_kernels
from expansion.terms import joint_exceedance_asymptotic, sfh_expansion_2d
from geometry.planar import steiner_coefficients_2d, validate_set
from simulation.field import DomainSizeError, SimulationError
from simulation.montecarlo import (
    discretize, estimate_exceedance, estimate_joint_exceedance, refinement_check, replicate_maxima,
)


def square(side, origin=(0.0, 0.0)):
    x0, y0 = origin
    corners = [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]
    edges = [{"type": "segment", "from": list(corners[i]), "to": list(corners[(i + 1) % 4])} for i in range(4)]
    return validate_set({"dimension": 2, "components": [{"outer": edges}]})


def config_with(**simulation) -> GausstailConfig:
    return GausstailConfig(simulation=SimulationSettings(**simulation))


def test_discretize_square():
    points = discretize(square(1.0), 0.1, 0.1)
    assert np.all((points >= -1e-12) & (points <= 1.0 + 1e-12))
    for corner in ((0, 0), (1, 0), (1, 1), (0, 1)):
        assert np.any(np.all(np.isclose(points, corner), axis=1))
    assert len(points) == len(np.unique(points, axis=0))
    assert len(points) >= 100


def test_discretize_curves_and_points(load_fixture):
    assert discretize(load_fixture("single_point"), 0.1, 0.1).tolist() == [[0.0, 0.0]]
    segment = discretize(load_fixture("segment"), 0.25, 0.25)
    assert len(segment) == 5
    with pytest.raises(SimulationError):
        discretize(load_fixture("segment"), 0.0, 0.1)


def test_estimates_do_not_depend_on_threads_or_blocks():
    S = square(0.3)
    levels = [1.0, 2.0, 3.0]
    reference = estimate_exceedance(S, levels, 3000, h=0.05, seed=9, config=config_with(block_size=4096), threads=1)
    threaded = estimate_exceedance(S, levels, 3000, h=0.05, seed=9, config=config_with(block_size=256), threads=4)
    assert [e.hits for e in threaded] == [e.hits for e in reference]
    assert [e.p_hat for e in threaded] == [e.p_hat for e in reference]


def test_single_point_matches_normal_tail(load_fixture):
    u = 1.0
    [estimate] = estimate_exceedance(load_fixture("single_point"), [u], 20_000, seed=3, threads=1)
    tail, _ = gaussian_kernels(u)
    assert abs(estimate.p_hat - tail) <= 4.0 * estimate.standard_error
    assert estimate.standard_error == pytest.approx(math.sqrt(estimate.p_hat * (1 - estimate.p_hat) / 20_000))


def test_disk_against_expansion(load_fixture):
    disk = load_fixture("disk")
    u = 2.5
    [estimate] = estimate_exceedance(disk, [u], 20_000, h=0.05, seed=0, threads=2)
    expansion = sfh_expansion_2d(steiner_coefficients_2d(disk), u).total
    assert abs(estimate.p_hat - expansion) <= 4.0 * estimate.standard_error + 0.05 * expansion


def test_levels_are_monotone():
    estimates = estimate_exceedance(square(0.5), [0.5, 1.5, 2.5, 3.5], 4000, h=0.05, seed=2, threads=1)
    hits = [e.hits for e in estimates]
    assert hits == sorted(hits, reverse=True)


def test_domain_size_limit():
    with pytest.raises(DomainSizeError):
        estimate_exceedance(square(3.5), [2.0], 10, h=0.5)
    with pytest.raises(DomainSizeError):
        estimate_joint_exceedance([square(0.5), square(0.5, origin=(3.5, 2.0))], 2.0, 10, h=0.1)


def test_joint_of_one_set_is_marginal():
    S = square(0.4)
    [marginal] = estimate_exceedance(S, [2.0], 2000, h=0.05, seed=4, threads=1)
    joint = estimate_joint_exceedance([S], 2.0, 2000, h=0.05, seed=4, threads=1)
    assert joint.hits == marginal.hits


def test_joint_is_below_marginals():
    a, b = square(0.4), square(0.4, origin=(1.5, 0.0))
    u = 1.5
    joint = estimate_joint_exceedance([a, b], u, 3000, h=0.05, seed=6, threads=1)
    maxima = replicate_maxima([discretize(a, 0.05, 0.05), discretize(b, 0.05, 0.05)], 3000, seed=6, threads=1)
    assert maxima.shape == (3000, 2)
    assert joint.hits == int(np.count_nonzero(np.all(maxima >= u, axis=1)))
    assert joint.hits <= min(int(np.count_nonzero(maxima[:, 0] >= u)), int(np.count_nonzero(maxima[:, 1] >= u)))


def test_invalid_replicates():
    with pytest.raises(SimulationError):
        replicate_maxima([np.zeros((1, 2))], 0, seed=0)
    with pytest.raises(SimulationError):
        estimate_exceedance(square(0.5), [2.0], 10, h=-0.1)


def test_diagnostics_counts():
    config = config_with(diagnostics_cap=5)
    estimates = estimate_exceedance(square(0.3), [0.5, 2.0], 2000, h=0.05, seed=1, config=config,
                                    threads=1, diagnostics=True)
    low, high = estimates
    assert low.diagnostics.examined == 0
    assert high.diagnostics.examined == min(high.hits, 5)
    counts = high.diagnostics
    assert counts.sandwich_failures <= counts.single_maximum <= counts.examined


def test_refinement_rows():
    S = square(0.3)
    estimates = estimate_exceedance(S, [1.0, 2.0], 2000, h=0.1, seed=5, threads=1)
    rows = refinement_check(S, estimates, h=0.1, seed=5, config=config_with(refinement_fraction=0.5), threads=1)
    assert [row.u for row in rows] == [1.0, 2.0]
    for row, estimate in zip(rows, estimates):
        assert row.p_coarse == estimate.p_hat
        assert math.isfinite(row.z_score)
    assert refinement_check(S, []) == []


def test_estimate_from_hits():
    estimate = MCEstimate.from_hits(u=2.0, hits=25, replicates=100, grid_h=0.01)
    assert estimate.p_hat == 0.25
    assert estimate.standard_error == pytest.approx(math.sqrt(0.25 * 0.75 / 100))


def test_distant_sets_rarely_exceed_together():
    a, b = square(0.4), square(0.4, origin=(2.4, 0.0))
    u, replicates = 2.5, 20_000
    joint = estimate_joint_exceedance([a, b], u, replicates, h=0.05, seed=8, threads=1)
    singles = [estimate_exceedance(S, [u], replicates, h=0.05, seed=8, threads=1)[0] for S in (a, b)]
    assert min(s.hits for s in singles) > 100
    assert 10 * joint.hits <= min(s.hits for s in singles)


@pytest.mark.slow
def test_single_point_calibration(load_fixture):
    estimates = estimate_exceedance(load_fixture("single_point"), [1.0, 2.0, 2.5], 100_000, seed=0)
    for estimate in estimates:
        tail, _ = gaussian_kernels(estimate.u)
        assert abs(estimate.p_hat - tail) <= 3.0 * estimate.standard_error


@pytest.mark.slow
def test_angle_against_expansion(load_fixture):
    angle = load_fixture("angle")
    coefficients = steiner_coefficients_2d(angle)
    remainders = []
    for estimate in estimate_exceedance(angle, [1.5, 2.5], 200_000, h=0.005, seed=0):
        expansion = sfh_expansion_2d(coefficients, estimate.u).total
        assert estimate.p_hat / expansion == pytest.approx(1.0, abs=0.15)
        _, density = gaussian_kernels(estimate.u)
        remainders.append(abs(estimate.p_hat - expansion) / (density / estimate.u))
    # the remainder is o(phi(u)/u)
    assert remainders[1] < remainders[0]


@pytest.mark.slow
def test_crossing_segments_follow_joint_law(load_fixture):
    pair = [load_fixture("crossing_a"), load_fixture("crossing_b")]
    ratios = []
    for u in (1.5, 2.5):
        joint = estimate_joint_exceedance(pair, u, 200_000, h=0.005, seed=0)
        ratios.append(joint.p_hat / joint_exceedance_asymptotic(4.0, 0.0, 2, u))
    assert all(0.5 <= ratio <= 1.5 for ratio in ratios)
    assert abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)
