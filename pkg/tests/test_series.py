import math

import numpy as np
import pytest

from error_handler import WindowTooSmall
from process import MqParams, SpecializationChain
from schur import Specialization
from series import (
    LaurentSeries,
    SeriesCache,
    default_truncation,
    j_series,
    kernel_coeff,
    rational_factor,
    resolve_method,
)
from settings import settings


@pytest.fixture
def params():
    return MqParams(0.1, 6)


def test_rational_factor_coefficients():
    series = rational_factor(0.5, 6)
    assert [series.coefficient(n) for n in range(4)] == [1.0, 1.0, 0.5, 0.25]
    inverse = rational_factor(0.5, 6, inverse=True)
    assert inverse.coefficient(-2) == 0.5
    assert inverse.coefficient(1) == 0.0


def test_factor_times_its_reflection_is_one():
    a = math.sqrt(0.1)
    product = rational_factor(a, 12) * rational_factor(-a, 12)
    assert np.allclose([product.coefficient(n) for n in range(13)], [1.0] + [0.0] * 12, atol=1e-14)


def test_window_is_enforced():
    series = LaurentSeries(0, np.ones(3), 2)
    assert series.coefficient(2) == 1.0
    with pytest.raises(WindowTooSmall):
        series.coefficient(3)


def test_mixed_radii_do_not_multiply():
    with pytest.raises(ValueError):
        LaurentSeries(0, np.ones(2), 4, 1.0) * LaurentSeries(0, np.ones(2), 4, 2.0)


def test_resolve_method(params):
    chain = SpecializationChain((Specialization((0.3,)),), (Specialization((0.2,)),))
    assert resolve_method(chain) == "product"
    assert resolve_method(params) == "product"
    assert resolve_method(MqParams(0.9)) == "circle"
    with pytest.raises(ValueError):
        resolve_method(chain, "circle")
    with pytest.raises(ValueError):
        resolve_method(params, "fft")


@pytest.mark.parametrize("q", [0.1, 0.4, 0.6])
@pytest.mark.parametrize("t", [-2, 0, 3])
def test_product_and_circle_agree(q, t):
    source = MqParams(q, 8)
    N = default_truncation(8, source=source)
    product = j_series(t, source, N, "product")
    circle = j_series(t, source, N, "circle")
    for n in range(-8, 9):
        assert circle.coefficient(n) == pytest.approx(product.coefficient(n), abs=1e-10)


def reflected(series):
    signs = np.where((np.arange(len(series.coeffs)) + series.lo) % 2 == 0, 1.0, -1.0)
    return LaurentSeries(series.lo, series.coeffs * signs, series.window, series.radius)


@pytest.mark.parametrize("t", [-1, 0, 2])
def test_j_series_times_its_reflection_is_one(params, t):
    series = j_series(t, params, 40, "product")
    product = series * reflected(series)
    assert [product.coefficient(n) for n in range(-6, 7)] == pytest.approx([0.0] * 6 + [1.0] + [0.0] * 6, abs=1e-13)


def test_j_series_tends_to_one_as_q_vanishes():
    series = j_series(0, MqParams(1e-8), 20, "product")
    assert series.coefficient(0) == pytest.approx(1.0, abs=1e-7)
    assert series.coefficient(1) == pytest.approx(2e-4, rel=1e-3)


def test_truncation_widens_with_q():
    assert default_truncation(3, source=MqParams(0.5)) == 6 + 107
    assert default_truncation(3, source=MqParams(0.1)) > default_truncation(3)
    assert default_truncation(3, source=MqParams(0.9)) > default_truncation(3, source=MqParams(0.5))


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("x, y, t1, t2", [(1, -1, 0, 0), (2, 3, 1, -1), (3, -2, -1, 2), (1, 1, 2, 0)])
def test_window_exactness(q, x, y, t1, t2):
    source = MqParams(q, 6)
    N = default_truncation(max(abs(x), abs(y)), source=source)
    base = kernel_coeff(x, y, t1, t2, source, N=N, method="product")
    assert kernel_coeff(x, y, t1, t2, source, N=N + 8, method="product") == pytest.approx(base, abs=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.3])
@pytest.mark.parametrize("M", [4, 8])
def test_factor_cutoff_bound(q, M):
    source = MqParams(q, 4)
    short = j_series(0, source, 40, "product", factors=M)
    longer = j_series(0, source, 40, "product", factors=M + 10)
    worst = max(abs(short.coefficient(n) - longer.coefficient(n)) for n in range(-12, 13))
    assert 0 < worst < 10 * q ** M


def test_default_kernel_at_one_half_matches_circle():
    source = MqParams(0.5, 4)
    product = kernel_coeff(1, -1, 0, 0, source)
    assert product == pytest.approx(kernel_coeff(1, -1, 0, 0, source, method="circle"), abs=1e-10)
    assert product == pytest.approx(-0.39257, abs=1e-4)


def test_circle_keeps_negative_exponents_at_late_times():
    source = MqParams(0.1, 6)
    circle = j_series(3, source, 24, "circle")
    product = j_series(3, source, 200, "product")
    for n in range(-12, 13):
        assert circle.coefficient(n) == pytest.approx(product.coefficient(n), abs=1e-12)


def test_circle_stops_at_roundoff():
    series = j_series(0, MqParams(0.3, 4), 20, "circle")
    assert series.window < settings.get("circle_max_points") // 4


def test_single_variable_chain_kernel():
    s, t = 0.3, 0.2
    chain = SpecializationChain((Specialization((s,)),), (Specialization((t,)),))
    # one-point function of the part 1 at the only time: 2 s t (1 - s t) / (1 + s t)
    value = -kernel_coeff(1, -1, 1, 1, chain)
    assert value == pytest.approx(2 * s * t * (1 - s * t) / (1 + s * t), abs=1e-13)


@pytest.mark.parametrize("x, y", [(1, 2), (2, 1), (3, -1), (1, 1)])
@pytest.mark.parametrize("t1, t2", [(0, 1), (2, -1), (-1, 0)])
def test_antisymmetric_across_times(params, x, y, t1, t2):
    assert kernel_coeff(x, y, t1, t2, params) == pytest.approx(-kernel_coeff(y, x, t2, t1, params), abs=1e-12)


@pytest.mark.parametrize("x", [1, 2, 3])
def test_equal_times_anti_diagonal(params, x):
    total = kernel_coeff(x, -x, 0, 0, params) + kernel_coeff(-x, x, 0, 0, params)
    assert total == pytest.approx((-1) ** x, abs=1e-12)
    assert kernel_coeff(x, x + 1, 1, 1, params) == pytest.approx(-kernel_coeff(x + 1, x, 1, 1, params), abs=1e-12)


def test_truncation_must_cover_exponents(params):
    assert default_truncation(-5, 4) == 14
    with pytest.raises(WindowTooSmall):
        kernel_coeff(10, 1, 0, 0, params, N=20)


def test_kernel_methods_agree_near_one():
    source = MqParams(0.7, 40)
    product = kernel_coeff(3, -2, 1, 0, source, method="product")
    circle = kernel_coeff(3, -2, 1, 0, source, method="circle")
    assert circle == pytest.approx(product, abs=1e-8)


def test_series_cache_evicts_oldest():
    cache = SeriesCache(max_size=2)
    one = LaurentSeries.one(4)
    cache.put("a", one)
    cache.put("b", one)
    cache.get("a")
    cache.put("c", one)
    assert cache.get("b") is None
    assert cache.get("a") is one
    assert cache.get("c") is one
    cache.clear()
    assert cache.get("a") is None
