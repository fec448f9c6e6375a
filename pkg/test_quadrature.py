"""
Tests for direction grids, sphere nodes, the spherical Laplacian and t-differences.
"""

import math

import numpy as np
import pytest

from src.catalog import get_function, max_of_logs
from src.constants import CHART_SWITCH_LOW
from src.errors import GridSizeError, SmoothnessError, SpacingError
from src.hopf import Point
from src.quadrature import (
    adapted_grid,
    clamp_schedule,
    euclidean_laplacian,
    grid_for,
    integrate,
    integrate_sphere,
    make_grid,
    polar_nodes,
    prepare,
    random_sphere_nodes,
    sphere_laplacian,
    sphere_nodes,
    t_derivative,
)


# ============================================================================
# Grids
# ============================================================================

def test_make_grid_weights_sum_to_pi():
    g = make_grid(8, 8)
    assert g.size == 64
    assert g.spec == "8x8"
    assert g.weights.sum() == pytest.approx(math.pi, rel=1e-13)


def test_make_grid_integrates_cos_squared():
    g = make_grid(16, 16)
    assert integrate(g.cos_theta ** 2, g) == pytest.approx(math.pi / 3.0, rel=1e-12)


def test_make_grid_rejects_small_sizes():
    with pytest.raises(GridSizeError):
        make_grid(4, 128)


def test_adapted_grid_mass_and_vectors():
    g = adapted_grid(10.0)
    assert g.layout == "LogPolar"
    assert g.weights.sum() == pytest.approx(math.pi * math.tanh(10.0), rel=1e-10)
    norms = np.linalg.norm(g.vectors, axis=1)
    assert norms == pytest.approx(np.ones_like(norms), abs=1e-14)
    assert g.describe()["x_max"] == 10.0


def test_grid_for_picks_layout():
    fc, g = prepare(get_function("demailly-m2"), -5.0)
    assert g.layout == "LogPolar"
    assert g.x_max == pytest.approx(16.0 + 3.0 * 5.0)

    plain = grid_for(get_function("log-norm"), -5.0, 16, 16)
    assert plain.layout == "GaussLegendre"
    assert plain.spec == "16x16"


def test_clamp_schedule_drops_unresolvable_depths():
    kept = clamp_schedule(get_function("demailly-m2"), [-2.0, -50.0, -200.0])
    assert kept == [-2.0, -50.0]
    assert clamp_schedule(get_function("log-norm"), [-2.0, -500.0]) == [-2.0, -500.0]


def test_sphere_nodes_total_mass():
    nodes = sphere_nodes(make_grid(8, 8), 4)
    assert nodes.size == 256
    assert nodes.weights.sum() == pytest.approx(2.0 * math.pi ** 2, rel=1e-13)
    assert np.linalg.norm(nodes.vectors, axis=1) == pytest.approx(np.ones(256), abs=1e-14)


def test_random_sphere_nodes_are_unit():
    nodes = random_sphere_nodes(500, np.random.default_rng(3))
    assert np.linalg.norm(nodes.vectors, axis=1) == pytest.approx(np.ones(500), abs=1e-14)
    assert nodes.weights.sum() == pytest.approx(2.0 * math.pi ** 2)


def test_polar_nodes_cover_theta():
    nodes = polar_nodes(get_function("log-norm"), -2.0, 16)
    assert nodes.weights.sum() == pytest.approx(math.pi, rel=1e-13)
    assert np.sum(nodes.weights * nodes.sin_theta) == pytest.approx(2.0, rel=1e-12)


# ============================================================================
# Laplacians
# ============================================================================

def test_log_norm_is_harmonic_on_the_sphere():
    lap = sphere_laplacian(get_function("log-norm"), -3.0, make_grid(8, 8))
    assert np.max(np.abs(lap)) < 1e-12


def test_weighted_norm_laplacian_by_stencils():
    g = make_grid(8, 8)
    lap = sphere_laplacian(get_function("weighted-norm"), -1.0, g)
    expected = -math.exp(-2.0) * g.cos_theta
    assert lap == pytest.approx(expected, abs=1e-6)


def test_laplacian_needs_smoothness():
    f = max_of_logs([(1.0, "z1"), (1.0, "z2")])
    with pytest.raises(SmoothnessError):
        sphere_laplacian(f, -1.0, make_grid(8, 8))


def test_euclidean_laplacian_of_norm_squared():
    p = Point.from_complex(0.3 + 0.1j, -0.2 + 0.2j)
    assert euclidean_laplacian(get_function("norm-squared"), p) == pytest.approx(8.0, rel=1e-6)


# ============================================================================
# Differences in t
# ============================================================================

def test_t_derivative_of_parabola():
    samples = [(t, t * t) for t in (0.0, 1.0, 2.0, 3.0, 4.0)]
    first = t_derivative(samples)
    assert first[1:-1] == pytest.approx([2.0, 4.0, 6.0])
    assert t_derivative(samples, order=2) == pytest.approx([2.0] * 5)


def test_t_derivative_validation():
    with pytest.raises(SpacingError):
        t_derivative([(0.0, 1.0), (1.0, 2.0)])
    with pytest.raises(SpacingError):
        t_derivative([(2.0, 1.0), (1.0, 2.0), (0.0, 3.0)])
    with pytest.raises(ValueError):
        t_derivative([(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)], order=3)


def test_integrate_sphere_and_ordered_reduction():
    nodes = sphere_nodes(make_grid(8, 8), 4)
    assert integrate_sphere(np.ones(nodes.size), nodes) == pytest.approx(2.0 * math.pi ** 2, rel=1e-13)

    g = make_grid(16, 16)
    values = np.cos(3.0 * g.theta) * np.sin(g.phi) ** 2
    strided = np.repeat(values, 2)[::2]
    assert integrate(strided, g) == integrate(values, g)


def test_grid_nodes_stay_in_the_chart_band():
    g = make_grid(8, 8)
    nodes = g.nodes
    assert len(nodes) == g.size
    for d, theta, _ in nodes:
        assert abs(d.w) <= 1.0 / CHART_SWITCH_LOW
        assert d.theta == pytest.approx(theta, abs=1e-12)
