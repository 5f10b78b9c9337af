"""
Volume Statistics Module

Mean and variance of the volume |pi| under the q-weighted measure and the
zeta(3) scaling law r^3 E|pi| -> 7 zeta(3) / 2 as r = -log q -> 0.
"""

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import zeta

from error_handler import error_handler
from schur import Scalar
from settings import settings

RELATIVE_CUTOFF = 1e-16


@dataclass(frozen=True)
class VolumeMoments:
    """E|pi| and Var|pi| at q = e^{-r}."""
    q: float
    r: float
    mean: float
    variance: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _rate(q: Scalar) -> float:
    q = float(q)
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return -math.log(q)


def _mean_terms(m: np.ndarray, r: float) -> np.ndarray:
    # 2 m^2 q^m / (1 - q^{2m})
    return 2.0 * m ** 2 * np.exp(-r * m) / -np.expm1(-2.0 * r * m)


def _variance_terms(m: np.ndarray, r: float) -> np.ndarray:
    # 2 m^3 q^m (1 + q^{2m}) / (1 - q^{2m})^2
    q2m = np.exp(-2.0 * r * m)
    return 2.0 * m ** 3 * np.exp(-r * m) * (1.0 + q2m) / np.expm1(-2.0 * r * m) ** 2


def _sum_series(terms: Callable[[np.ndarray, float], np.ndarray], r: float, peak: float,
                max_terms: Optional[int] = None) -> float:
    """
    Sum terms(m) over m >= 1 in growing blocks; stop once past the peak of
    the summand with the last term below 1e-16 of the partial sum.
    """
    max_terms = int(settings.get("volume_max_terms") if max_terms is None else max_terms)
    partial = []
    total = 0.0
    start, block = 1, 1024
    while start <= max_terms:
        m = np.arange(start, min(start + block, max_terms + 1), dtype=float)
        values = terms(m, r)
        partial.append(math.fsum(values))
        total = math.fsum(partial)
        if m[-1] > peak and values[-1] < RELATIVE_CUTOFF * total:
            return total
        start, block = int(m[-1]) + 1, block * 2
    error_handler.log_warning(f"series cut at {max_terms} terms for r={r}", "stats")
    return total


def expected_volume(q: Scalar) -> float:
    """E|pi| = sum_{m>=1} 2 m^2 q^m / (1 - q^{2m})."""
    r = _rate(q)
    return _sum_series(_mean_terms, r, 2.0 / r)


def variance_volume(q: Scalar) -> float:
    """Var|pi| = q d/dq E|pi| = sum_{m>=1} 2 m^3 q^m (1 + q^{2m}) / (1 - q^{2m})^2."""
    r = _rate(q)
    return _sum_series(_variance_terms, r, 3.0 / r)


def volume_moments(q: Scalar) -> VolumeMoments:
    return VolumeMoments(float(q), _rate(q), expected_volume(q), variance_volume(q))


def zeta3_limits() -> Tuple[float, float]:
    """(7 zeta(3) / 2, 21 zeta(3) / 2): limits of r^3 E|pi| and r^4 Var|pi|."""
    # r^3 E -> integral of 2 u^2 / (e^u - e^{-u}) = 4 sum_k 1 / (2k+1)^3
    z3 = float(zeta(3.0))
    return 7.0 * z3 / 2.0, 21.0 * z3 / 2.0


def volume_table(r_values: Sequence[float]) -> pd.DataFrame:
    """DataFrame with columns r, E, r3E, Var, r4Var."""
    rows = []
    for r in r_values:
        q = math.exp(-r)
        mean, variance = expected_volume(q), variance_volume(q)
        rows.append((r, mean, r ** 3 * mean, variance, r ** 4 * variance))
    return pd.DataFrame(rows, columns=["r", "E", "r3E", "Var", "r4Var"])


def _minus_mean_slope(r: float, h: float = 1e-4) -> float:
    """-dE/dr by the five-point central stencil."""
    f = [expected_volume(math.exp(-(r + k * h))) for k in (-2, -1, 1, 2)]
    return -(f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the stats module."""
    mean_limit, _ = zeta3_limits()
    table = volume_table([0.2, 0.1, 0.05, 0.02])
    gaps = list(mean_limit - table["r3E"])
    return {
        "low_order": abs(expected_volume(1e-6) - 2e-6) < 1e-10,
        "variance_is_derivative": abs(variance_volume(0.1) - _minus_mean_slope(-math.log(0.1)))
        <= 1e-8 * variance_volume(0.1),
        "monotone_approach": all(a > b > 0 for a, b in zip(gaps, gaps[1:])),
        "law_at_0.01": abs(0.01 ** 3 * expected_volume(math.exp(-0.01)) / mean_limit - 1) < 0.05,
    }
