"""
Laurent Series Module

Truncated Laurent series, the generating function J(t, z) of the shifted
Schur process and the correlation kernel coefficients K_{x,y}(t1, t2).

A series may carry a radius R: the stored entry g_n then stands for the
coefficient g_n * R^{-n}. J(t, .) for the q-weighted measure has modulus one
on |z| = q^{-t/2}, so sampling it there and taking an FFT yields bounded
entries even when q is close to 1.
"""

import math
import threading
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Optional, Tuple, Union

import numpy as np

from error_handler import WindowTooSmall, error_handler
from process import MqParams, SpecializationChain
from settings import settings

Source = Union[MqParams, SpecializationChain]


@dataclass(frozen=True)
class LaurentSeries:
    """Entries for exponents lo .. lo+len-1, trusted on the window [-N, N]."""

    lo: int
    coeffs: np.ndarray
    window: int
    radius: float = 1.0

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @classmethod
    def one(cls, window: int) -> "LaurentSeries":
        return cls(0, np.ones(1), window)

    def _check(self, n: int) -> None:
        if abs(n) > self.window:
            raise WindowTooSmall(f"exponent {n} outside the window [-{self.window}, {self.window}]")

    def scaled(self, n: int) -> float:
        """Stored entry g_n (zero outside the stored range)."""
        self._check(n)
        if self.lo <= n <= self.hi:
            return self.coeffs[n - self.lo]
        return 0.0

    def scaled_at(self, exponents: np.ndarray) -> np.ndarray:
        """Vectorized scaled(); exponents must lie in the window."""
        exponents = np.asarray(exponents, dtype=np.int64)
        if exponents.size and np.max(np.abs(exponents)) > self.window:
            raise WindowTooSmall(f"exponents reach outside the window [-{self.window}, {self.window}]")
        idx = exponents - self.lo
        inside = (idx >= 0) & (idx < len(self.coeffs))
        out = np.zeros(exponents.shape, dtype=self.coeffs.dtype)
        out[inside] = self.coeffs[idx[inside]]
        return out

    def coefficient(self, n: int) -> float:
        """True coefficient of z^n."""
        return self.scaled(n) * self.radius ** (-n)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        if not math.isclose(self.radius, other.radius, rel_tol=1e-14):
            raise ValueError(f"cannot multiply series at radii {self.radius} and {other.radius}")
        window = min(self.window, other.window)
        product = np.convolve(self.coeffs, other.coeffs)
        lo = self.lo + other.lo
        start = max(lo, -window)
        stop = min(lo + len(product) - 1, window)
        if start > stop:
            return LaurentSeries(0, np.zeros(1), window, self.radius)
        return LaurentSeries(start, product[start - lo:stop - lo + 1], window, self.radius)

    def to_dict(self) -> Dict[str, Any]:
        """Debug dump {lo, coeffs, window, radius}."""
        return {
            "lo": self.lo,
            "coeffs": [float(c) for c in self.coeffs],
            "window": self.window,
            "radius": self.radius,
        }


def rational_factor(a: float, N: int, inverse: bool = False) -> LaurentSeries:
    """
    F(a; z) = (1 + a z) / (1 - a z) = 1 + 2 sum_k a^k z^k up to z^N.

    With inverse=True the same expansion is taken in z^{-1}, i.e. F(a; 1/z),
    which is the convergent form for the large-|z| factors.
    """
    k = np.arange(N + 1)
    coeffs = 2.0 * float(a) ** k
    coeffs[0] = 1.0
    if inverse:
        return LaurentSeries(-N, coeffs[::-1].copy(), N)
    return LaurentSeries(0, coeffs, N)


class SeriesCache:
    """Simple LRU cache for J-series."""

    def __init__(self, max_size: int = 256):
        self.max_size = max_size
        self.cache: Dict[Hashable, LaurentSeries] = {}
        self.access_order: List[Hashable] = []
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[LaurentSeries]:
        """Get cached series."""
        with self._lock:
            if key in self.cache:
                # Move to end (most recently used)
                self.access_order.remove(key)
                self.access_order.append(key)
                return self.cache[key]
        return None

    def put(self, key: Hashable, value: LaurentSeries) -> None:
        """Cache a series."""
        with self._lock:
            if key in self.cache:
                self.access_order.remove(key)
            elif len(self.cache) >= self.max_size:
                oldest = self.access_order.pop(0)
                del self.cache[oldest]
            self.cache[key] = value
            self.access_order.append(key)

    def clear(self) -> None:
        """Clear all cached series."""
        with self._lock:
            self.cache.clear()
            self.access_order.clear()


series_cache = SeriesCache()


def series_decay(source: Source) -> float:
    """Geometric rate at which the Laurent coefficients of J(t, .) decay away from z^0."""
    if isinstance(source, MqParams):
        return math.sqrt(float(source.q))
    return max((abs(float(v)) for s in source.plus + source.minus for v in s), default=0.0)


def default_truncation(max_exponent: int, margin: Optional[int] = None, source: Optional[Source] = None) -> int:
    """
    2 * max |exponent| + margin.

    Given a source, the margin is widened until decay^margin < series_epsilon,
    so coefficients near the window edge and the kernel sums over the window
    carry no visible truncation error.
    """
    margin = settings.get("series_margin") if margin is None else margin
    if source is not None:
        decay = series_decay(source)
        if 0 < decay < 1:
            margin = max(margin, math.ceil(math.log(settings.get("series_epsilon")) / math.log(decay)))
    return 2 * abs(int(max_exponent)) + margin


def resolve_method(source: Source, method: str = "auto") -> str:
    if method not in ("auto", "product", "circle"):
        raise ValueError(f"unknown J-series method: {method}")
    if isinstance(source, SpecializationChain):
        if method == "circle":
            raise ValueError("the circle method needs the q-weighted source")
        return "product"
    if method == "auto":
        return "product" if float(source.q) <= 0.5 else "circle"
    return method


def mq_factor_count(q: float, scale: float = 1.0, epsilon: Optional[float] = None) -> int:
    """Smallest M with q^{M} * scale < epsilon."""
    epsilon = settings.get("series_epsilon") if epsilon is None else epsilon
    return max(1, math.ceil(math.log(epsilon / scale) / math.log(q)))


def _mq_ranges(t: int) -> Tuple[int, int]:
    """First m of the z-factors and of the 1/z-factors, a_m = q^{m + 1/2}."""
    return (t, 0) if t >= 0 else (0, -t)


def _mq_product(t: int, q: float, N: int, factors: Optional[int]) -> LaurentSeries:
    start_z, start_inv = _mq_ranges(t)
    count = factors if factors is not None else mq_factor_count(q)
    z_part = LaurentSeries.one(N)
    inv_part = LaurentSeries.one(N)
    for m in range(count):
        z_part = z_part * rational_factor(q ** (start_z + m + 0.5), N)
        # 1 / F(a; 1/z) = F(-a; 1/z)
        inv_part = inv_part * rational_factor(-q ** (start_inv + m + 0.5), N, inverse=True)
    return z_part * inv_part


def _log_j_on_circle(t: int, q: float, z: np.ndarray, chunk: int = 64) -> np.ndarray:
    start_z, start_inv = _mq_ranges(t)
    radius = abs(z[0])
    total = np.zeros(z.shape, dtype=complex)

    a = q ** (start_z + 0.5 + np.arange(mq_factor_count(q, q ** (start_z + 0.5) * radius)))
    for i in range(0, len(a), chunk):
        az = a[i:i + chunk, None] * z[None, :]
        total += np.sum(np.log1p(az) - np.log1p(-az), axis=0)

    b = q ** (start_inv + 0.5 + np.arange(mq_factor_count(q, q ** (start_inv + 0.5) / radius)))
    for i in range(0, len(b), chunk):
        bz = b[i:i + chunk, None] / z[None, :]
        total -= np.sum(np.log1p(bz) - np.log1p(-bz), axis=0)
    return total


def _circle_spectrum(t: int, q: float, radius: float, points: int) -> Tuple[np.ndarray, float]:
    """FFT of J(t, .) sampled on |z| = radius and the log of max |J| there."""
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    log_j = _log_j_on_circle(t, q, z)
    peak = float(np.max(log_j.real))
    return np.fft.fft(np.exp(log_j - peak)) / points, peak


def _mq_circle(t: int, q: float, N: int) -> LaurentSeries:
    """
    Sample J on |z| = q^{-t/2}, where it has modulus one, and for t != 0 also on
    |z| = 1. Each exponent takes its entry from the circle whose roundoff bound
    max|J| * rho^{-n} is smaller; the circles agree up to that bound.
    """
    radius = q ** (-t / 2.0)
    tolerance = max(settings.get("series_epsilon"), settings.get("circle_tolerance"))
    max_points = settings.get("circle_max_points")
    points = max(settings.get("circle_min_points"), 1 << math.ceil(math.log2(4 * (N + 1))))
    radii = [radius] if t == 0 else [radius, 1.0]

    while True:
        spectra = [_circle_spectrum(t, q, rho, points) for rho in radii]
        tail = max(np.abs(g[points // 4:3 * points // 4]).max() / np.abs(g).max() for g, _ in spectra)
        if tail <= tolerance:
            break
        if points >= max_points:
            error_handler.log_warning(f"aliasing tail {tail:.2e} at {points} points (t={t}, q={q})", "series.circle")
            break
        points *= 2

    window = points // 4
    n = np.arange(-window, window + 1)
    center, center_peak = spectra[0]
    coeffs = center[n % points].real * math.exp(center_peak)
    if len(spectra) == 2:
        unit, unit_peak = spectra[1]
        # stored entries are at radius R: entry = coefficient * R^n
        log_scale = n * math.log(radius)
        use_unit = unit_peak + log_scale < center_peak
        coeffs[use_unit] = unit[n[use_unit] % points].real * np.exp(unit_peak + log_scale[use_unit])
    error_handler.log_debug(f"t={t} q={q}: {points} points, window {window}", "series.circle")
    return LaurentSeries(-window, coeffs, window, radius)


def _chain_product(t: int, chain: SpecializationChain, N: int) -> LaurentSeries:
    if not 1 <= t <= chain.T:
        raise ValueError(f"chain time must lie in [1, {chain.T}], got {t}")
    result = LaurentSeries.one(N)
    for m in range(t, chain.T + 1):
        for a in chain.rho_minus(m):
            result = result * rational_factor(float(a), N)
    for m in range(0, t):
        for b in chain.rho_plus(m):
            result = result * rational_factor(-float(b), N, inverse=True)
    return result


def j_series(
    t: int,
    source: Source,
    N: Optional[int] = None,
    method: str = "auto",
    factors: Optional[int] = None,
) -> LaurentSeries:
    """
    Coefficients of J(t, z) on [-N, N].

    For a chain, J(t, z) = prod_{t<=m<=T} F(rho_m^-; z) / prod_{0<=m<t} F(rho_m^+; 1/z).
    For the q-weighted source the products run over a_m = q^{m+1/2}:
    m >= t in z and m >= 0 in 1/z when t >= 0, and m >= 0 in z and m >= -t
    in 1/z when t < 0. The circle method may return a wider window than N.
    """
    N = settings.get("series_margin") if N is None else int(N)
    method = resolve_method(source, method)
    # J does not depend on the window of the q-weighted source
    source_key = ("mq", float(source.q)) if isinstance(source, MqParams) else source
    key = (int(t), source_key, N, method, factors)
    use_cache = settings.get("cache_enabled")
    if use_cache:
        cached = series_cache.get(key)
        if cached is not None:
            return cached

    if isinstance(source, SpecializationChain):
        result = _chain_product(int(t), source, N)
    elif method == "product":
        result = _mq_product(int(t), float(source.q), N, factors)
    else:
        result = _mq_circle(int(t), float(source.q), N)

    if use_cache:
        series_cache.put(key, result)
    return result


def _region_weights(count: int) -> np.ndarray:
    """c_0 = 1/2, c_k = (-1)^k: coefficients of (z - w) / (2 (z + w)) in powers of w/z."""
    weights = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
    if count:
        weights[0] = 0.5
    return weights


def kernel_from_series(x: int, y: int, j1: LaurentSeries, j2: LaurentSeries, later_first: bool) -> float:
    """
    Coefficient of z^x w^y in (z - w) / (2 (z + w)) J1(z) J2(w).

    later_first selects the region |z| > |w| (t1 >= t2), where the prefactor is
    sum_k c_k (w/z)^k; otherwise |z| < |w| and it is -sum_k c_k (z/w)^k.
    """
    if later_first:
        kmax = min(j1.window - x, j2.window + y)
        sign, ratio = 1.0, j2.radius / j1.radius
        k = np.arange(max(kmax, -1) + 1)
        terms = j1.scaled_at(x + k) * j2.scaled_at(y - k)
    else:
        kmax = min(j1.window + x, j2.window - y)
        sign, ratio = -1.0, j1.radius / j2.radius
        k = np.arange(max(kmax, -1) + 1)
        terms = j1.scaled_at(x - k) * j2.scaled_at(y + k)
    if not len(k):
        return 0.0
    total = float(np.sum(_region_weights(len(k)) * terms * ratio ** k))
    return sign * total * j1.radius ** (-x) * j2.radius ** (-y)


def kernel_coeff(
    x: int,
    y: int,
    t1: int,
    t2: int,
    source: Source,
    N: Optional[int] = None,
    method: str = "auto",
) -> float:
    """K_{x,y}(t1, t2) from the Laurent coefficients of J(t1, .) and J(t2, .)."""
    margin = settings.get("series_margin")
    N = default_truncation(max(abs(x), abs(y)), margin, source) if N is None else int(N)
    if max(abs(x), abs(y)) > N - margin:
        raise WindowTooSmall(f"|x|, |y| must be at most N - {margin} = {N - margin}")
    j1 = j_series(t1, source, N, method)
    j2 = j_series(t2, source, N, method)
    return kernel_from_series(x, y, j1, j2, t1 >= t2)


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the series module."""
    params = MqParams(0.1, 4)
    a = 0.1 ** 0.5
    cancel = rational_factor(a, 12) * rational_factor(-a, 12)
    j0 = j_series(0, params, 24, "product")
    circle = j_series(0, params, 24, "circle")
    checks = {
        "factor_cancels": bool(np.allclose([cancel.coefficient(n) for n in range(13)], [1.0] + [0.0] * 12)),
        "z2_coefficient": math.isclose(rational_factor(a, 4).coefficient(2), 0.2, rel_tol=1e-14),
        "methods_agree": all(abs(j0.coefficient(n) - circle.coefficient(n)) < 1e-12 for n in range(-8, 9)),
        "antisymmetry": abs(kernel_coeff(2, 1, 0, 0, params) + kernel_coeff(1, 2, 0, 0, params)) < 1e-12,
        "antidiagonal": abs(kernel_coeff(1, -1, 0, 0, params) + kernel_coeff(-1, 1, 0, 0, params) + 1.0) < 1e-12,
    }
    return checks
