"""
Asymptotics Module

Bulk scaling limits of the correlation functions as q = e^{-r} -> 1 with
r t -> tau and r x -> chi: the angle theta(tau, chi), the limit kernels as
contour integrals over arcs of |z| = e^{-|tau|/2}, the limiting density,
the limit shape and the boundary of its domain.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

from error_handler import InvalidWindow, QuadratureNotConverged, error_handler
from grid_runner import run_grid
from pfaffian import SkewSymmetricMatrix, pfaffian
from settings import settings


@dataclass(frozen=True)
class LimitPoint:
    """Scaled coordinates (tau, chi) of the plane diagram, chi >= 0."""

    tau: float
    chi: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and math.isfinite(self.chi)):
            raise InvalidWindow(f"tau and chi must be finite, got ({self.tau}, {self.chi})")
        if self.chi < 0:
            raise InvalidWindow(f"chi must be nonnegative, got {self.chi}")


@dataclass(frozen=True)
class WindowConfig:
    """
    Points near a limit point, given by integer offsets (dt, dx).

    For the chi = 0 boundary the parts x_i do not scale and are listed in
    boundary_parts; their dx offsets are then ignored.
    """

    offsets: Tuple[Tuple[int, int], ...]
    boundary_parts: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        offsets = tuple((int(dt), int(dx)) for dt, dx in self.offsets)
        if not offsets:
            raise InvalidWindow("window must contain at least one point")
        object.__setattr__(self, "offsets", offsets)
        if self.boundary_parts is not None:
            parts = tuple(int(x) for x in self.boundary_parts)
            if len(parts) != len(offsets):
                raise InvalidWindow(f"{len(parts)} boundary parts for {len(offsets)} points")
            if any(x < 1 for x in parts):
                raise InvalidWindow(f"boundary parts must be positive: {parts}")
            if len(set(zip((dt for dt, _ in offsets), parts))) != len(parts):
                raise InvalidWindow("boundary points must be distinct")
            object.__setattr__(self, "boundary_parts", parts)
        elif len(set(offsets)) != len(offsets):
            raise InvalidWindow("window offsets must be distinct")

    @property
    def size(self) -> int:
        return len(self.offsets)

    @property
    def is_boundary(self) -> bool:
        return self.boundary_parts is not None


def theta(p: LimitPoint) -> float:
    """
    arccos((e^{|tau|} + 1)(e^{chi} - 1) / (2 e^{|tau|/2} (e^{chi} + 1))), or 0
    when the argument exceeds 1. The argument equals cosh(tau/2) tanh(chi/2).
    """
    arg = math.cosh(abs(p.tau) / 2.0) * math.tanh(p.chi / 2.0)
    if arg > 1.0:
        return 0.0
    return math.acos(arg)


def limiting_density(p: LimitPoint) -> float:
    """theta / pi."""
    return theta(p) / math.pi


def amoeba_boundary(xi: float) -> float:
    """omega = log((e^{|xi|} + 1) / (e^{|xi|} - 1)); infinite at xi = 0."""
    xi = abs(xi)
    if xi == 0.0:
        return math.inf
    # log(coth(xi / 2)) without overflow for large xi
    return math.log1p(2.0 / math.expm1(xi))


def support_boundary(tau: float) -> float:
    """chi beyond which theta vanishes: tanh(chi/2) = sech(tau/2)."""
    return 2.0 * amoeba_boundary(abs(tau) / 2.0)


def _quad(func: Callable[[float], float], a: float, b: float, label: str) -> float:
    epsabs = settings.get("quad_epsabs")
    epsrel = settings.get("quad_epsrel")
    result = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel,
                            limit=settings.get("quad_limit"), full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        # Roundoff warnings on an already tiny error estimate are harmless
        if abserr > 1e3 * max(epsabs, epsrel * abs(value)):
            raise QuadratureNotConverged(f"{label}: {result[3]} (error estimate {abserr:.2e})")
        error_handler.log_debug(f"{label}: accepted with error estimate {abserr:.2e}", "quadrature")
    return value


def arc_integral(dt: int, exponent: float, radius: float, angle: float) -> complex:
    """
    (1/2 pi i) int ((1 - z)/(1 + z))^{dt} z^{-exponent-1} dz over an arc of |z| = radius.

    For dt >= 0 the arc runs counterclockwise from angle -theta to theta;
    otherwise clockwise from -theta to theta - 2 pi, through z = -radius.
    With z = R e^{i phi} the integral becomes (1/2 pi) int ((1-z)/(1+z))^{dt} z^{-exponent} dphi.
    """
    def integrand(phi: float) -> complex:
        z = radius * complex(math.cos(phi), math.sin(phi))
        base = (1 - z) / (1 + z) if dt >= 0 else (1 + z) / (1 - z)
        return base ** abs(dt) * z ** (-exponent)

    start, stop = (-angle, angle) if dt >= 0 else (-angle, angle - 2.0 * math.pi)
    if start == stop:
        return 0j
    label = f"arc(dt={dt}, exponent={exponent}, R={radius:.6g}, theta={angle:.6g})"
    real = _quad(lambda phi: integrand(phi).real, start, stop, label)
    imag = _quad(lambda phi: integrand(phi).imag, start, stop, label)
    return complex(real, imag) / (2.0 * math.pi)


def _require_bulk(p: LimitPoint) -> None:
    if p.chi < settings.get("chi_continuity"):
        raise InvalidWindow(f"bulk kernel needs chi >= {settings.get('chi_continuity')}, got {p.chi}")


def bulk_kernel_entry(dt: int, dx: int, p: LimitPoint, with_residual: bool = False):
    """
    K(dt, dx) of the bulk limit: the arc integral with R = e^{-|tau|/2} and
    angle theta(p). With with_residual=True returns (real part, imaginary part).
    """
    _require_bulk(p)
    value = arc_integral(int(dt), int(dx), math.exp(-abs(p.tau) / 2.0), theta(p))
    if abs(value.imag) > 1e-10:
        error_handler.log_warning(f"imaginary residual {value.imag:.2e} at dt={dt}, dx={dx}", "bulk_kernel")
    if with_residual:
        return value.real, value.imag
    return value.real


def bulk_matrix(window: WindowConfig, p: LimitPoint) -> np.ndarray:
    """[K(i, j)] with dt_ij = dt_i - dt_j and dx_ij = dx_i - dx_j."""
    _require_bulk(p)
    n = window.size
    out = np.zeros((n, n))
    for i, (ti, xi) in enumerate(window.offsets):
        for j, (tj, xj) in enumerate(window.offsets):
            out[i, j] = bulk_kernel_entry(ti - tj, xi - xj, p)
    return out


def boundary_matrix(window: WindowConfig, p: LimitPoint) -> SkewSymmetricMatrix:
    """
    The 2n x 2n matrix of the chi = 0 limit, R = e^{-|tau|/2}, angle pi/2.

    Above the diagonal, with i' = 2n - 1 - i (0-based):
      i < j < n:       (-1)^{x_j}  I(dt_ij,   x_i + x_j)
      i < n <= j:                  I(dt_ij',  x_i - x_j')
      n <= i < j:      (-1)^{x_i'} I(dt_i'j', -(x_i' + x_j'))
    where I(dt, e) is the arc integral of ((1-z)/(1+z))^{dt} z^{-e-1}.
    """
    if not window.is_boundary:
        raise InvalidWindow("boundary matrix needs boundary_parts")
    if p.chi != 0:
        raise InvalidWindow(f"boundary matrix needs chi = 0, got {p.chi}")
    radius = math.exp(-abs(p.tau) / 2.0)
    angle = math.pi / 2.0
    times = [dt for dt, _ in window.offsets]
    parts = list(window.boundary_parts)
    n = window.size

    def entry(i: int, j: int) -> float:
        if j < n:
            value = arc_integral(times[i] - times[j], parts[i] + parts[j], radius, angle)
            return (-1) ** parts[j] * value.real
        jp = 2 * n - 1 - j
        if i < n:
            return arc_integral(times[i] - times[jp], parts[i] - parts[jp], radius, angle).real
        ip = 2 * n - 1 - i
        value = arc_integral(times[ip] - times[jp], -(parts[ip] + parts[jp]), radius, angle)
        return (-1) ** parts[ip] * value.real

    upper = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            upper[i, j] = entry(i, j)
    return SkewSymmetricMatrix(upper)


def limit_correlation(window: WindowConfig, p: LimitPoint) -> float:
    """det of the bulk kernel when chi > 0, Pfaffian of the boundary matrix when chi = 0."""
    if window.is_boundary:
        return float(pfaffian(boundary_matrix(window, p)))
    _require_bulk(p)
    if theta(p) == 0.0:
        return 0.0
    return float(np.linalg.det(bulk_matrix(window, p)))


def sine_kernel(dx: int, angle: float) -> float:
    """sin(theta dx) / (pi dx), theta / pi on the diagonal."""
    if dx == 0:
        return angle / math.pi
    return math.sin(angle * dx) / (math.pi * dx)


def limit_shape_point(p: LimitPoint) -> Tuple[float, float, float]:
    """
    (x, y, z) of the limit shape over (tau, chi).

    With I = int_chi^inf theta(tau, s) / pi ds: x = I, y = I + tau for tau >= 0
    and x = I - tau, y = I for tau < 0; z = chi. The integrand vanishes past
    the support boundary; at tau = 0 it is integrated up to shape_chi_max and
    the tail int 2 e^{-s/2} / pi ds is added.
    """
    upper = support_boundary(p.tau)
    tail = 0.0
    if math.isinf(upper):
        upper = max(settings.get("shape_chi_max"), p.chi)
        tail = 4.0 / math.pi * math.exp(-upper / 2.0)
    integral = 0.0
    if upper > p.chi:
        integral = _quad(lambda s: theta(LimitPoint(p.tau, s)) / math.pi, p.chi, upper,
                         f"shape(tau={p.tau}, chi={p.chi})")
    integral += tail
    if p.tau >= 0:
        return integral, integral + p.tau, p.chi
    return integral - p.tau, integral, p.chi


def density_mesh(tau: float, chi_values: Sequence[float], workers: Optional[int] = None) -> pd.DataFrame:
    """DataFrame with columns tau, chi, density over the given chi values."""
    densities = run_grid(lambda chi: limiting_density(LimitPoint(tau, chi)), list(chi_values),
                         workers, label="density")
    return pd.DataFrame({"tau": [float(tau)] * len(densities), "chi": list(map(float, chi_values)),
                         "density": densities})


def shape_mesh(taus: Sequence[float], chis: Sequence[float], workers: Optional[int] = None,
               progress: bool = False) -> pd.DataFrame:
    """DataFrame with columns tau, chi, x, y, z; rows ordered by tau, then chi."""
    grid = [(float(t), float(c)) for t in taus for c in chis]
    shape = run_grid(lambda tc: limit_shape_point(LimitPoint(*tc)), grid, workers, progress, "shape")
    return pd.DataFrame(
        [(t, c, x, y, z) for (t, c), (x, y, z) in zip(grid, shape)],
        columns=["tau", "chi", "x", "y", "z"],
    )


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the asymptotics module."""
    center = LimitPoint(0.0, math.log(3.0))
    angle = theta(center)
    checks = {
        "theta_log3": abs(angle - math.pi / 3) < 1e-15,
        "edge_density": limiting_density(LimitPoint(1.3, 0.0)) == 0.5,
        "sine_kernel": all(
            abs(bulk_kernel_entry(0, dx, center) - sine_kernel(dx, angle)) < 1e-8 for dx in range(-6, 7)
        ),
        "amoeba": all(
            abs(math.cosh(xi) * math.tanh(amoeba_boundary(xi)) - 1.0) < 1e-9 for xi in (0.5, 1.0, 2.0)
        ),
        "beyond_support": theta(LimitPoint(1.0, support_boundary(1.0) + 1e-6)) == 0.0,
    }
    single = limit_correlation(WindowConfig(((0, 0),), (1,)), LimitPoint(0.0, 0.0))
    checks["boundary_single_point"] = abs(single - 0.5) < 1e-10
    return checks
