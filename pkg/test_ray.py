"""
Tests for ray traces and the checks run along them.
"""

import math

import pytest

from src.catalog import get_function
from src.errors import SpacingError
from src.quadrature import make_grid, prepare
from src.ray import (
    check_convexity,
    check_decomposition_identity,
    check_en002_surrogate,
    check_quasi_psh,
    check_script_I_convexity,
    geodesic_test,
    liminf_Iprime,
    mass_bound_along_ray,
    trace,
)


def _grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 10) for k in range(count)]


@pytest.fixture(scope="module")
def log_norm_trace():
    return trace(get_function("log-norm"), _grid(-22.0, -2.0, 1.0), n_theta=16, n_phi=16, threads=1)


def test_trace_records_are_ordered(log_norm_trace):
    assert log_norm_trace.t[0] == -22.0
    assert log_norm_trace.t[-1] == -2.0
    assert len(log_norm_trace.records) == 21
    assert log_norm_trace.grid["layout"] == "GaussLegendre"
    assert log_norm_trace.column("I") == pytest.approx([math.pi] * 21, rel=1e-12)


def test_trace_rejects_decreasing_grid():
    with pytest.raises(SpacingError):
        trace(get_function("log-norm"), [-2.0, -3.0, -4.0], n_theta=8, n_phi=8)


def test_trace_is_independent_of_threads():
    f = get_function("smoothed-max-1-2")
    grid = _grid(-4.0, -2.0, 0.5)
    serial = trace(f, grid, threads=1)
    parallel = trace(f, grid, threads=3)
    assert [r.K for r in serial.records] == [r.K for r in parallel.records]


def test_identity_and_convexity_for_log_norm(log_norm_trace):
    assert check_decomposition_identity(log_norm_trace) < 1e-10

    verdict = check_convexity(log_norm_trace)
    assert verdict.passed
    assert verdict.affine
    assert verdict.min_first_difference == pytest.approx(math.pi, rel=1e-10)

    script = check_script_I_convexity(log_norm_trace)
    assert script.passed and script.affine


def test_identity_converges_with_the_step():
    f = get_function("smoothed-max-1-2")
    coarse = check_decomposition_identity(trace(f, _grid(-6.0, -2.0, 0.1), threads=1))
    fine = check_decomposition_identity(trace(f, _grid(-6.0, -2.0, 0.05), threads=1))
    assert coarse < 1e-3
    assert fine < coarse / 2.5


def test_convexity_needs_uniform_steps():
    tr = trace(get_function("log-norm"), [-5.0, -4.0, -3.5, -2.0], n_theta=8, n_phi=8)
    with pytest.raises(SpacingError):
        check_convexity(tr)


def test_liminf_Iprime(log_norm_trace):
    assert abs(liminf_Iprime(log_norm_trace)) < 1e-10

    shallow = trace(get_function("log-norm"), _grid(-5.0, -2.0, 1.0), n_theta=8, n_phi=8)
    with pytest.raises(SpacingError):
        liminf_Iprime(shallow)


def test_mass_bound_along_ray(log_norm_trace):
    verdict = mass_bound_along_ray(log_norm_trace, get_function("log-norm"), 3.0)
    assert verdict.passed
    assert verdict.M_A == pytest.approx(1.0)
    assert verdict.worst_margin == pytest.approx(2.0 * math.pi, rel=1e-8)
    assert verdict.checked == 19

    with pytest.raises(ValueError):
        mass_bound_along_ray(log_norm_trace, get_function("log-norm"), 30.0)


def test_vanishing_surrogate_for_norm_squared():
    f = get_function("norm-squared")
    tr = trace(f, _grid(-25.0, -20.0, 0.5), n_theta=8, n_phi=8)
    verdict = check_en002_surrogate(tr, f, delta=1e-3)
    assert verdict.premise
    assert verdict.passed
    assert verdict.K_tail < verdict.bound


def test_geodesic_test_is_consistent():
    radial = get_function("radial-a2")
    flat = geodesic_test(trace(radial, _grid(-4.0, -2.0, 0.5), n_theta=8, n_phi=8), radial)
    assert flat.K_constant and flat.geodesic and flat.consistent

    smooth = get_function("norm-squared")
    curved = geodesic_test(trace(smooth, _grid(-3.0, -1.0, 0.5), n_theta=8, n_phi=8), smooth)
    assert not curved.K_constant
    assert not curved.geodesic
    assert curved.consistent
    assert curved.shell_mass == pytest.approx(4.0 * (math.exp(-4.0) - math.exp(-12.0)), rel=1e-5)


def test_quasi_psh():
    fc, g = prepare(get_function("demailly-m2"), -4.0)
    verdict = check_quasi_psh(fc, [-4.0, -3.0, -2.0], g)
    assert verdict.passed
    assert verdict.min_defect > -1e-12

    plain = check_quasi_psh(get_function("log-norm"), [-2.0], make_grid(8, 8))
    assert plain.min_defect == pytest.approx(1.0)
