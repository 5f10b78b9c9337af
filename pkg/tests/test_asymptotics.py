import math

import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from asymptotics import (
    LimitPoint,
    WindowConfig,
    amoeba_boundary,
    arc_integral,
    boundary_matrix,
    bulk_kernel_entry,
    bulk_matrix,
    density_mesh,
    limit_correlation,
    limit_shape_point,
    limiting_density,
    shape_mesh,
    sine_kernel,
    support_boundary,
    theta,
)
from correlation import rho_pf
from error_handler import InvalidWindow
from process import MqParams


def test_theta_at_log_three():
    assert theta(LimitPoint(0.0, math.log(3.0))) == pytest.approx(math.pi / 3, abs=1e-15)


@given(st.floats(-6.0, 6.0, allow_nan=False))
def test_density_is_half_on_the_edge(tau):
    assert limiting_density(LimitPoint(tau, 0.0)) == 0.5


@given(st.floats(-4.0, 4.0, allow_nan=False), st.floats(0.0, 8.0, allow_nan=False))
@hypothesis_settings(max_examples=50)
def test_density_in_unit_interval(tau, chi):
    assert 0.0 <= limiting_density(LimitPoint(tau, chi)) <= 0.5


def test_zero_beyond_support():
    for tau in (0.5, 1.0, 3.0):
        edge = support_boundary(tau)
        assert theta(LimitPoint(tau, edge + 1e-6)) == 0.0
        assert theta(LimitPoint(tau, 2 * edge)) == 0.0
        assert theta(LimitPoint(tau, edge * 0.9)) > 0.0
    assert math.isinf(support_boundary(0.0))


@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0])
def test_boundary_locus_is_the_amoeba(xi):
    tau = 2.0 * xi
    locus = brentq(lambda chi: math.cosh(tau / 2) * math.tanh(chi / 2) - 1.0, 1e-9, 50.0, xtol=1e-14)
    assert locus / 2.0 == pytest.approx(amoeba_boundary(xi), abs=1e-9)
    assert amoeba_boundary(-xi) == amoeba_boundary(xi)


def test_limit_point_validation():
    with pytest.raises(InvalidWindow):
        LimitPoint(0.0, -0.1)
    with pytest.raises(InvalidWindow):
        LimitPoint(math.inf, 1.0)


def test_window_validation():
    with pytest.raises(InvalidWindow):
        WindowConfig(())
    with pytest.raises(InvalidWindow):
        WindowConfig(((0, 1), (0, 1)))
    with pytest.raises(InvalidWindow):
        WindowConfig(((0, 0), (1, 0)), boundary_parts=(1,))
    with pytest.raises(InvalidWindow):
        WindowConfig(((0, 0),), boundary_parts=(0,))
    assert WindowConfig(((0, 0), (0, 1))).size == 2


def test_full_circle_picks_constant_term():
    assert arc_integral(0, 0, 1.0, math.pi) == pytest.approx(1.0)
    assert abs(arc_integral(0, 2, 0.8, math.pi)) < 1e-12


@pytest.mark.parametrize("chi", [0.5, math.log(3.0), 1.5])
def test_sine_kernel_at_equal_times(chi):
    p = LimitPoint(0.0, chi)
    angle = theta(p)
    for dx in range(-6, 7):
        assert bulk_kernel_entry(0, dx, p) == pytest.approx(sine_kernel(dx, angle), abs=1e-8)


def test_bulk_needs_positive_chi():
    with pytest.raises(InvalidWindow):
        bulk_kernel_entry(0, 1, LimitPoint(0.0, 0.0))


def test_imaginary_residual_is_small():
    _, imag = bulk_kernel_entry(2, 1, LimitPoint(0.7, 0.4), with_residual=True)
    assert abs(imag) < 1e-10


def test_single_point_limit_is_density():
    p = LimitPoint(0.8, 0.3)
    assert limit_correlation(WindowConfig(((0, 0),)), p) == pytest.approx(limiting_density(p), abs=1e-10)
    assert limit_correlation(WindowConfig(((0, 0),)), LimitPoint(1.0, 5.0)) == 0.0


def test_two_points_repel():
    p = LimitPoint(0.0, math.log(3.0))
    pair = limit_correlation(WindowConfig(((0, 0), (0, 1))), p)
    assert 0.0 < pair < limiting_density(p) ** 2
    matrix = bulk_matrix(WindowConfig(((0, 0), (0, 1))), p)
    assert matrix[0, 1] == pytest.approx(matrix[1, 0])


@pytest.mark.parametrize("tau", [0.0, 0.7])
@pytest.mark.parametrize("part", [1, 2, 5])
def test_boundary_single_point(tau, part):
    window = WindowConfig(((0, 0),), boundary_parts=(part,))
    assert limit_correlation(window, LimitPoint(tau, 0.0)) == pytest.approx(0.5, abs=1e-10)


def test_boundary_window_needs_the_edge():
    window = WindowConfig(((0, 0),), boundary_parts=(1,))
    with pytest.raises(InvalidWindow):
        boundary_matrix(window, LimitPoint(0.0, 0.5))
    with pytest.raises(InvalidWindow):
        boundary_matrix(WindowConfig(((0, 0),)), LimitPoint(0.0, 0.0))


def test_limit_shape_geometry():
    x, y, z = limit_shape_point(LimitPoint(1.0, 0.5))
    assert y - x == pytest.approx(1.0)
    assert z == 0.5
    x_neg, y_neg, _ = limit_shape_point(LimitPoint(-1.0, 0.5))
    assert (x_neg, y_neg) == pytest.approx((y, x))
    assert limit_shape_point(LimitPoint(2.0, support_boundary(2.0) + 0.1))[:2] == (0.0, 2.0)
    lower = limit_shape_point(LimitPoint(0.0, 0.2))[0]
    higher = limit_shape_point(LimitPoint(0.0, 1.0))[0]
    assert lower > higher > 0.0


def test_density_mesh():
    chis = [0.05 * k for k in range(61)]
    mesh = density_mesh(0.0, chis, workers=3)
    assert list(mesh.columns) == ["tau", "chi", "density"]
    assert len(mesh) == 61
    assert mesh["density"].iloc[0] == 0.5
    assert mesh["density"].is_monotonic_decreasing
    assert mesh.equals(density_mesh(0.0, chis, workers=1))


def test_shape_mesh_ordering():
    mesh = shape_mesh([-0.5, 0.5], [0.2, 0.4], workers=2)
    assert list(mesh.columns) == ["tau", "chi", "x", "y", "z"]
    assert list(zip(mesh["tau"], mesh["chi"])) == [(-0.5, 0.2), (-0.5, 0.4), (0.5, 0.2), (0.5, 0.4)]


def finite_q_correlation(points, r):
    params = MqParams.for_times(math.exp(-r), [t for t, _ in points])
    return rho_pf(points, params, method="circle").value


def test_bulk_window_across_times_follows_finite_q():
    chi = math.log(3.0)
    limit = limit_correlation(WindowConfig(((0, 0), (1, 1))), LimitPoint(0.0, chi))
    gaps = []
    for r in (0.1, 0.05):
        x = round(chi / r)
        gaps.append(abs(finite_q_correlation([(0, x), (1, x + 1)], r) - limit))
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.01


@pytest.mark.parametrize("parts", [(1,), (1, 2)])
def test_boundary_pfaffian_follows_finite_q(parts):
    window = WindowConfig(tuple((0, 0) for _ in parts), boundary_parts=parts)
    limit = limit_correlation(window, LimitPoint(0.0, 0.0))
    gaps = [abs(finite_q_correlation([(0, x) for x in parts], r) - limit) for r in (0.1, 0.05)]
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.05
