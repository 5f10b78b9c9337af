"""
Correlation Module

Correlation functions rho(X) = Prob(X is contained in the plane diagram)
as Pfaffians of kernel matrices, and a brute-force enumeration oracle for
the q-weighted measure with an explicit truncation error bound.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np

from enumeration_cache import enumeration_cache
from error_handler import CapExceeded, InvalidPoints, error_handler
from partitions import PointConfiguration, plane_diagram
from pfaffian import SkewSymmetricMatrix, pfaffian, pfaffian_reference
from process import MqParams, SpecializationChain, macmahon_coeffs
from schur import Scalar, Specialization, format_scalar
from series import Source, default_truncation, kernel_coeff, resolve_method
from settings import settings

Points = Union[PointConfiguration, Iterable[Tuple[int, int]]]

# Exact MacMahon coefficients used by the oracle tail bound
TAIL_EXACT_TERMS = 24


@dataclass
class CorrelationResult:
    """rho(X) with the method that produced it."""

    points: Tuple[Tuple[int, int], ...]
    value: float
    method: str
    error_bound: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert result to dictionary for serialization."""
        return {
            "points": [list(p) for p in self.points],
            "value": self.value,
            "method": self.method,
            "error_bound": self.error_bound,
            "params": self.metadata,
        }


def as_points(points: Points) -> PointConfiguration:
    if isinstance(points, PointConfiguration):
        return points
    return PointConfiguration(tuple(tuple(p) for p in points))


def _source_metadata(source: Source) -> Dict[str, Any]:
    if isinstance(source, MqParams):
        return source.to_dict()
    return {"chain": source.to_dict()}


def build_matrix(
    points: Points,
    source: Source,
    N: Optional[int] = None,
    method: str = "auto",
    canonical: bool = True,
) -> SkewSymmetricMatrix:
    """
    The 2n x 2n matrix M_X.

    Row a < n stands for point a with part x_a; row a >= n stands for the
    reflected point a' = 2n - 1 - a with part -x_{a'} and sign (-1)^{x_{a'}}.
    Then M(a, b) = s_a s_b K_{y_a, y_b}(t_a, t_b) above the diagonal, which
    reproduces the three blocks K_{x_i,x_j}, (-1)^{x_j'} K_{x_i,-x_j'} and
    (-1)^{x_i' + x_j'} K_{-x_i',-x_j'}.
    """
    config = as_points(points)
    if not len(config):
        raise InvalidPoints("point configuration must be nonempty")
    if canonical:
        config = config.canonical()
    pts = config.points
    n = len(pts)
    N = default_truncation(max(x for _, x in pts), source=source) if N is None else N

    times, parts, signs = [], [], []
    for a in range(2 * n):
        t, x = pts[a] if a < n else pts[2 * n - 1 - a]
        times.append(t)
        parts.append(x if a < n else -x)
        signs.append(1.0 if a < n or x % 2 == 0 else -1.0)

    upper = np.zeros((2 * n, 2 * n))
    for a in range(2 * n):
        for b in range(a + 1, 2 * n):
            k = kernel_coeff(parts[a], parts[b], times[a], times[b], source, N, method)
            upper[a, b] = signs[a] * signs[b] * k
    return SkewSymmetricMatrix(upper)


def rho_pf(
    points: Points,
    source: Source,
    N: Optional[int] = None,
    method: str = "auto",
    pfaffian_method: str = "pfaffian",
    canonical: bool = True,
) -> CorrelationResult:
    """rho(X) = Pf(M_X)."""
    config = as_points(points)
    matrix = build_matrix(config, source, N, method, canonical)
    if pfaffian_method == "pfaffian":
        value = pfaffian(matrix)
    elif pfaffian_method == "reference":
        value = pfaffian_reference(matrix)
    else:
        raise ValueError(f"unknown Pfaffian method: {pfaffian_method}")

    max_x = max(x for _, x in config)
    metadata = _source_metadata(source)
    metadata.update({
        "truncation": default_truncation(max_x, source=source) if N is None else N,
        "series_method": resolve_method(source, method),
    })
    shown = config.canonical() if canonical else config
    return CorrelationResult(shown.points, float(np.real(value)), pfaffian_method, None, metadata)


def rho_pf_reference(points: Points, source: Source, N: Optional[int] = None, method: str = "auto",
                     canonical: bool = True) -> CorrelationResult:
    """Same matrix as rho_pf, Pfaffian summed over perfect matchings."""
    return rho_pf(points, source, N, method, "reference", canonical)


@lru_cache(maxsize=8)
def _oracle_tables(v_max: int, cap: int) -> Tuple[np.ndarray, np.ndarray, Dict[Tuple[int, int], np.ndarray]]:
    """Volumes, alternations and, per point, the indices of the partitions containing it."""
    records = enumeration_cache.records(v_max, cap)
    volumes = np.array([r.volume for r in records], dtype=np.int64)
    alternations = np.array([r.alternation for r in records], dtype=np.int64)
    index: Dict[Tuple[int, int], list] = {}
    for k, record in enumerate(records):
        for point in plane_diagram(record.pi):
            index.setdefault(point, []).append(k)
    return volumes, alternations, {p: np.array(ks, dtype=np.int64) for p, ks in index.items()}


def _weights(q: float, volumes: np.ndarray, alternations: np.ndarray) -> np.ndarray:
    return np.exp(alternations * math.log(2.0) + volumes * math.log(q))


@lru_cache(maxsize=1)
def _tail_coeffs() -> Tuple[int, ...]:
    return tuple(macmahon_coeffs(TAIL_EXACT_TERMS, cap=TAIL_EXACT_TERMS))


def oracle_tail(q: float, v_max: int) -> float:
    """
    Upper estimate of sum_{n > v_max} c_n q^n for the MacMahon coefficients c_n.

    Exact c_n up to 24; beyond, c_n <= c_24 * ratio^(n - 24) with ratio = c_24 / c_23.
    """
    coeffs = _tail_coeffs()
    tail = sum(coeffs[n] * q ** n for n in range(v_max + 1, TAIL_EXACT_TERMS + 1))
    ratio = coeffs[TAIL_EXACT_TERMS] / coeffs[TAIL_EXACT_TERMS - 1]
    step = ratio * q
    if step >= 1.0:
        return math.inf
    start = max(v_max, TAIL_EXACT_TERMS)
    # geometric continuation from n = start + 1
    c_start = coeffs[TAIL_EXACT_TERMS] * ratio ** (start - TAIL_EXACT_TERMS)
    return tail + c_start * q ** start * step / (1.0 - step)


def rho_oracle(points: Points, q: Scalar, v_max: int, cap: Optional[int] = None) -> CorrelationResult:
    """
    Truncated ratio of sums of 2^{A(pi)} q^{|pi|} over pi containing X and
    over all pi, both with |pi| <= v_max.
    """
    cap = settings.get("enumeration_cap") if cap is None else cap
    if v_max > cap:
        raise CapExceeded(f"v_max {v_max} exceeds the enumeration cap {cap}")
    q_float = float(q)
    if not 0 < q_float < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    config = as_points(points).canonical()
    if not len(config):
        raise InvalidPoints("point configuration must be nonempty")

    volumes, alternations, index = _oracle_tables(v_max, cap)
    weights = _weights(q_float, volumes, alternations)
    z_trunc = float(np.sum(weights))

    members = None
    for point in config:
        hits = index.get(point, np.zeros(0, dtype=np.int64))
        members = hits if members is None else np.intersect1d(members, hits, assume_unique=True)
    value = float(np.sum(weights[members])) / z_trunc

    bound = oracle_tail(q_float, v_max) / z_trunc
    metadata = {"q": format_scalar(q), "v_max": v_max}
    return CorrelationResult(config.points, value, "oracle", bound, metadata)


def volume_moments_oracle(q: Scalar, v_max: int, cap: Optional[int] = None) -> Dict[str, float]:
    """Mean and second moment of |pi| over the truncated enumeration, with the tail/Z error scale."""
    cap = settings.get("enumeration_cap") if cap is None else cap
    volumes, alternations, _ = _oracle_tables(v_max, cap)
    weights = _weights(float(q), volumes, alternations)
    z_trunc = float(np.sum(weights))
    return {
        "mean": float(np.sum(weights * volumes)) / z_trunc,
        "second_moment": float(np.sum(weights * volumes ** 2)) / z_trunc,
        "error_bound": oracle_tail(float(q), v_max) / z_trunc,
    }


def finite_q_density(tau: float, chi: float, r: float, method: str = "circle") -> CorrelationResult:
    """One-point function at (t, x) = (round(tau / r), round(chi / r)) for q = e^{-r}."""
    t, x = int(round(tau / r)), int(round(chi / r))
    if x < 1:
        raise InvalidPoints(f"chi / r rounds to part {x}; parts must be positive")
    params = MqParams.for_times(math.exp(-r), [t])
    result = rho_pf([(t, x)], params, method=method)
    result.metadata.update({"tau": tau, "chi": chi, "r": r})
    error_handler.log_debug(f"r={r}: rho({t}, {x}) = {result.value:.12f}", "finite_q_density")
    return result


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the correlation module."""
    s, t = 0.3, 0.2
    chain = SpecializationChain((Specialization((s,)),), (Specialization((t,)),))
    chain_rho = rho_pf([(1, 1)], chain).value
    params = MqParams(0.1, 6)
    checks = {
        "chain_single_point": abs(chain_rho - 2 * s * t * (1 - s * t) / (1 + s * t)) < 1e-12,
    }
    for pts in ([(0, 1)], [(0, 1), (0, 2)], [(0, 1), (1, 1)]):
        pf_value = rho_pf(pts, params).value
        oracle = rho_oracle(pts, Fraction(1, 10), 12)
        checks[f"oracle_{pts}"] = abs(pf_value - oracle.value) <= oracle.error_bound + 1e-8
    return checks
