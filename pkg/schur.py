"""
Schur Functions Module

Skew Schur P and Q functions under finite specializations, the pairing H,
and a numeric check of the QPQP summation identity. Values are exact
Fractions when every specialization value is rational, floats otherwise.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple, Union

from error_handler import PoleOnProduct, ShapeTooLarge, error_handler
from partitions import StrictPartition, as_partition, skew_strip_stats, strict_partitions, strict_partitions_inside
from settings import settings

Scalar = Union[Fraction, float]


def parse_scalar(value: Any) -> Scalar:
    """Numbers or "p/q" strings; integers and rational strings stay exact."""
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"value must be finite: {value!r}")
        return value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            return Fraction(text)
        if any(c in text for c in ".eEnN"):
            return parse_scalar(float(text))
        return Fraction(int(text))
    raise ValueError(f"not a number: {value!r}")


def is_exact(values: Sequence[Any]) -> bool:
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)


def unit(exact: bool) -> Scalar:
    return Fraction(1) if exact else 1.0


def power_of_two(exponent: int, exact: bool) -> Scalar:
    return Fraction(2) ** exponent if exact else 2.0 ** exponent


def exact_sqrt(value: Scalar) -> Scalar:
    """Square root, kept as a Fraction when value is the square of a rational."""
    if isinstance(value, (Fraction, int)):
        value = Fraction(value)
        if value >= 0:
            num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
            if num * num == value.numerator and den * den == value.denominator:
                return Fraction(num, den)
        return math.sqrt(value)
    return math.sqrt(value)


def format_scalar(value: Scalar) -> Any:
    """JSON-friendly form: "p/q" for Fractions, float otherwise."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    return float(value)


@dataclass(frozen=True)
class Specialization:
    """x_i = values[i-1] for i <= k and x_i = 0 beyond."""

    values: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(parse_scalar(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.values)

    @property
    def exact(self) -> bool:
        return is_exact(self.values)

    def union(self, other: "Specialization") -> "Specialization":
        return Specialization(self.values + other.values)

    def to_json(self) -> str:
        return json.dumps([format_scalar(v) for v in self.values])

    @classmethod
    def from_json(cls, data: Union[str, Sequence[Any]]) -> "Specialization":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, list):
            raise ValueError(f"expected a JSON array, got {data!r}")
        return cls(tuple(data))


def _tableau_sum(lam: StrictPartition, mu: StrictPartition, values: Tuple[Scalar, ...], cap: int) -> Scalar:
    """
    Sum of x^T over marked shifted tableaux of shape lam - mu.

    Entries are coded 2k-1 for k' and 2k for k, so rows and columns weakly
    increase in code. Unmarked k at most once per column and marked k' at
    most once per row reduce to comparisons with the upper and left cells.
    """
    exact = is_exact(values)
    zero, one = unit(exact) * 0, unit(exact)
    cells = [
        (i, j)
        for i in range(1, lam.length + 1)
        for j in range(i + mu.part(i - 1), i + lam.part(i - 1))
    ]
    if not cells:
        return one
    k = len(values)
    if k == 0:
        return zero

    filling: Dict[Tuple[int, int], int] = {}
    visited = 0

    def fill(idx: int, acc: Scalar) -> Scalar:
        nonlocal visited
        if idx == len(cells):
            return acc
        visited += 1
        if visited > cap:
            raise ShapeTooLarge(f"more than {cap} partial fillings for {lam.parts}/{mu.parts}")
        i, j = cells[idx]
        left = filling.get((i, j - 1), 0)
        above = filling.get((i - 1, j), 0)
        total = zero
        for code in range(max(left, above, 1), 2 * k + 1):
            if code % 2 == 0 and code == above:
                continue
            if code % 2 == 1 and code == left:
                continue
            filling[(i, j)] = code
            total += fill(idx + 1, acc * values[(code + 1) // 2 - 1])
        filling.pop((i, j), None)
        return total

    return fill(0, one)


def skew_pq(lam, mu, spec: Specialization, kind: str = "Q", cap: Optional[int] = None) -> Scalar:
    """P_{lam/mu} or Q_{lam/mu} at spec, by summing over marked shifted tableaux."""
    lam, mu = as_partition(lam), as_partition(mu)
    cap = settings.get("tableau_cap") if cap is None else cap
    exact = spec.exact
    if not lam.contains(mu):
        return unit(exact) * 0
    q_value = _tableau_sum(lam, mu, spec.values, cap)
    if kind == "Q":
        return q_value
    if kind == "P":
        return power_of_two(mu.length - lam.length, exact) * q_value
    raise ValueError(f"kind must be 'P' or 'Q', got {kind!r}")


def skew_q_single(lam, mu, s: Scalar) -> Scalar:
    """Q_{lam/mu}(s) = 2^{a(lam-mu)} s^{|lam|-|mu|} when lam - mu is a horizontal strip, else 0."""
    lam, mu = as_partition(lam), as_partition(mu)
    exact = is_exact([s])
    stats = skew_strip_stats(lam, mu)
    if not (stats.contains and stats.horizontal_strip):
        return unit(exact) * 0
    return power_of_two(stats.a, exact) * s ** (lam.weight - mu.weight)


def skew_q(lam, mu, spec: Specialization) -> Scalar:
    """Q_{lam/mu}(spec) using the closed form for zero or one variable."""
    lam, mu = as_partition(lam), as_partition(mu)
    if len(spec) == 0:
        return unit(spec.exact) * (1 if lam == mu else 0)
    if len(spec) == 1:
        return skew_q_single(lam, mu, spec.values[0])
    return skew_pq(lam, mu, spec, "Q")


def skew_p(lam, mu, spec: Specialization) -> Scalar:
    """P_{lam/mu}(spec) = 2^{l(mu)-l(lam)} Q_{lam/mu}(spec)."""
    lam, mu = as_partition(lam), as_partition(mu)
    return power_of_two(mu.length - lam.length, spec.exact) * skew_q(lam, mu, spec)


def h_pairing(specx: Specialization, specy: Specialization) -> Scalar:
    """H(x; y) = prod_{i,j} (1 + x_i y_j) / (1 - x_i y_j)."""
    result = unit(specx.exact and specy.exact)
    for a in specx:
        for b in specy:
            ab = a * b
            if ab == 1:
                raise PoleOnProduct(f"x_i * y_j = 1 for x_i={a}, y_j={b}")
            result *= (1 + ab) / (1 - ab)
    return result


def cauchy_sum(specx: Specialization, specy: Specialization, cutoff: int) -> Scalar:
    """Truncated Cauchy sum over strict lam with |lam| <= cutoff of Q_lam(x) P_lam(y)."""
    total = unit(specx.exact and specy.exact) * 0
    empty = StrictPartition()
    for lam in strict_partitions(cutoff):
        if lam.length > min(len(specx), len(specy)):
            continue
        total += skew_q(lam, empty, specx) * skew_p(lam, empty, specy)
    return total


def _qpqp_sides(mu, nu, specx: Specialization, specy: Specialization, cutoff: int) -> Tuple[Scalar, Scalar]:
    mu, nu = as_partition(mu), as_partition(nu)
    lhs = unit(specx.exact and specy.exact) * 0
    for lam in strict_partitions(cutoff):
        if lam.contains(mu) and lam.contains(nu):
            lhs += skew_q(lam, mu, specx) * skew_p(lam, nu, specy)

    bound = [min(mu.part(i), nu.part(i)) for i in range(min(mu.length, nu.length))]
    finite = unit(specx.exact and specy.exact) * 0
    for tau in strict_partitions_inside(bound):
        finite += skew_q(nu, tau, specx) * skew_p(mu, tau, specy)
    return lhs, h_pairing(specx, specy) * finite


def verify_qpqp(mu, nu, specx: Specialization, specy: Specialization, cutoff: int) -> float:
    """Residual of sum_lam Q_{lam/mu}(x) P_{lam/nu}(y) = H(x;y) sum_tau Q_{nu/tau}(x) P_{mu/tau}(y)."""
    lhs, rhs = _qpqp_sides(mu, nu, specx, specy, cutoff)
    return float(abs(lhs - rhs))


def qpqp_report(mu, nu, specx: Specialization, specy: Specialization, cutoff: int) -> Dict[str, Any]:
    """Both sides, the residual and the geometric tail scale (2 max|a|)^cutoff."""
    lhs, rhs = _qpqp_sides(mu, nu, specx, specy, cutoff)
    largest = max([abs(float(v)) for v in specx.values + specy.values] or [0.0])
    report = {
        "mu": list(as_partition(mu).parts),
        "nu": list(as_partition(nu).parts),
        "x": [format_scalar(v) for v in specx],
        "y": [format_scalar(v) for v in specy],
        "cutoff": cutoff,
        "lhs": float(lhs),
        "rhs": float(rhs),
        "residual": float(abs(lhs - rhs)),
        "tail_scale": (2.0 * largest) ** cutoff,
    }
    error_handler.log_debug(f"residual {report['residual']:.3e}", "qpqp")
    return report


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the schur module."""
    s, t = Fraction(1, 3), Fraction(1, 5)
    x = Specialization((s,))
    checks = {
        "single_box_q": skew_pq((1,), (), x, "Q") == 2 * s,
        "strip_example": skew_q_single((3, 1), (2,), s) == 4 * s ** 2,
        "non_strip_vanishes": skew_q_single((5, 3, 2), (4, 1), s) == 0,
        "h_single": h_pairing(x, Specialization((t,))) == (1 + s * t) / (1 - s * t),
    }
    agree = True
    for lam in strict_partitions(6):
        for mu in strict_partitions(lam.weight):
            agree = agree and skew_q_single(lam, mu, s) == skew_pq(lam, mu, x, "Q")
    checks["closed_form_matches_tableaux"] = agree
    checks["qpqp"] = verify_qpqp((1,), (), Specialization((0.3,)), Specialization((0.2,)), 20) < 1e-9
    return checks
