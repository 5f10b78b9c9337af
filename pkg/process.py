"""
Shifted Schur Process Module

Weights, partition function and probabilities of the shifted Schur
process, the specialization chain realising the measure
2^{A(pi)} q^{|pi|} / Z on strict plane partitions, and the shifted
MacMahon product.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from error_handler import CapExceeded, error_handler
from partitions import (
    StrictPartition,
    StrictPlanePartition,
    alternation,
    as_partition,
    enumerate_spp,
    from_diagonals,
    strict_partitions_inside,
)
from schur import (
    Scalar,
    Specialization,
    exact_sqrt,
    format_scalar,
    h_pairing,
    is_exact,
    parse_scalar,
    power_of_two,
    skew_p,
    skew_q,
    unit,
)
from settings import settings


@dataclass(frozen=True)
class SpecializationChain:
    """
    Specializations (rho_0^+, rho_1^-, rho_1^+, ..., rho_{T-1}^+, rho_T^-).

    plus[i] is rho_i^+ for 0 <= i < T and minus[j] is rho_{j+1}^-.
    """

    plus: Tuple[Specialization, ...]
    minus: Tuple[Specialization, ...]

    def __post_init__(self):
        object.__setattr__(self, "plus", tuple(self.plus))
        object.__setattr__(self, "minus", tuple(self.minus))
        if len(self.plus) != len(self.minus) or not self.plus:
            raise ValueError(
                f"chain needs T >= 1 plus and minus specializations, got {len(self.plus)} and {len(self.minus)}"
            )

    @property
    def T(self) -> int:
        return len(self.plus)

    def rho_plus(self, i: int) -> Specialization:
        return self.plus[i]

    def rho_minus(self, j: int) -> Specialization:
        return self.minus[j - 1]

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.plus + self.minus)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "T": self.T,
            "plus": [[format_scalar(v) for v in s] for s in self.plus],
            "minus": [[format_scalar(v) for v in s] for s in self.minus],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SpecializationChain":
        chain = cls(
            tuple(Specialization(tuple(v)) for v in data["plus"]),
            tuple(Specialization(tuple(v)) for v in data["minus"]),
        )
        if "T" in data and int(data["T"]) != chain.T:
            raise ValueError(f"T={data['T']} does not match {chain.T} specializations")
        return chain

    @classmethod
    def from_json(cls, text: str) -> "SpecializationChain":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MqParams:
    """q in (0, 1) and the half-width T of the window of diagonals [-T, T]."""

    q: Scalar
    window: int = 8

    def __post_init__(self):
        q = parse_scalar(self.q)
        if not 0 < q < 1:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        if int(self.window) < 1:
            raise ValueError(f"window must be positive, got {self.window}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "window", int(self.window))

    @property
    def r(self) -> float:
        return -math.log(float(self.q))

    @property
    def exact(self) -> bool:
        return is_exact([self.q])

    @staticmethod
    def default_window(q: Scalar, max_abs_t: int = 0, tolerance: Optional[float] = None) -> int:
        """max |t| queried plus ceil(log(tolerance) / log q)."""
        tolerance = settings.get("window_tolerance") if tolerance is None else tolerance
        extra = math.ceil(math.log(tolerance) / math.log(float(q)))
        return max(1, int(max_abs_t) + extra)

    @classmethod
    def for_times(cls, q: Scalar, times: Sequence[int], tolerance: Optional[float] = None) -> "MqParams":
        max_abs_t = max((abs(t) for t in times), default=0)
        return cls(q, cls.default_window(parse_scalar(q), max_abs_t, tolerance))

    def to_dict(self) -> Dict[str, Any]:
        return {"q": format_scalar(self.q), "window": self.window}


def weight_w(lam_seq: Sequence, mu_seq: Sequence, chain: SpecializationChain) -> Scalar:
    """
    W(lambda, mu) = Q_{lambda^1}(rho_0^+) P_{lambda^1/mu^1}(rho_1^-) Q_{lambda^2/mu^1}(rho_1^+) ...
                    P_{lambda^T}(rho_T^-)
    """
    lam = [as_partition(l) for l in lam_seq]
    mu = [as_partition(m) for m in mu_seq]
    T = chain.T
    if len(lam) != T or len(mu) != T - 1:
        raise ValueError(f"need {T} lambdas and {T - 1} mus, got {len(lam)} and {len(mu)}")

    empty = StrictPartition()
    mu_full = [empty] + mu + [empty]
    result = unit(chain.exact)
    for i in range(1, T + 1):
        result *= skew_q(lam[i - 1], mu_full[i - 1], chain.rho_plus(i - 1))
        if not result:
            return result
        result *= skew_p(lam[i - 1], mu_full[i], chain.rho_minus(i))
        if not result:
            return result
    return result


def marginal_weight(lam_seq: Sequence, chain: SpecializationChain) -> Scalar:
    """
    Sum of W(lambda, mu) over all mu.

    mu^i only meets lambda^i and lambda^{i+1}, so the sum factorizes into one
    finite sum over strict mu^i inside lambda^i and lambda^{i+1} per gap.
    """
    lam = [as_partition(l) for l in lam_seq]
    T = chain.T
    if len(lam) != T:
        raise ValueError(f"need {T} lambdas, got {len(lam)}")

    empty = StrictPartition()
    result = skew_q(lam[0], empty, chain.rho_plus(0)) * skew_p(lam[-1], empty, chain.rho_minus(T))
    for i in range(1, T):
        if not result:
            break
        left, right = lam[i - 1], lam[i]
        bound = [min(left.part(k), right.part(k)) for k in range(min(left.length, right.length))]
        gap = unit(chain.exact) * 0
        for mu in strict_partitions_inside(bound):
            gap += skew_p(left, mu, chain.rho_minus(i)) * skew_q(right, mu, chain.rho_plus(i))
        result *= gap
    return result


def partition_function(chain: SpecializationChain) -> Scalar:
    """Z = prod_{0 <= i < j <= T} H(rho_i^+; rho_j^-)."""
    result = unit(chain.exact)
    for i in range(chain.T):
        for j in range(i + 1, chain.T + 1):
            result *= h_pairing(chain.rho_plus(i), chain.rho_minus(j))
    return result


def prob(lam_seq: Sequence, chain: SpecializationChain) -> Scalar:
    """Probability of the sequence lambda^1, ..., lambda^T under the process."""
    return marginal_weight(lam_seq, chain) / partition_function(chain)


def mq_chain(params: MqParams) -> SpecializationChain:
    """
    Chain of the measure restricted to diagonals t in [-T, T].

    One-sided slot k = 1..2T+1 carries lambda^{k-T-1}. The only nonempty
    specializations are rho_n^+ = (q^{-(2n+1)/2}) for n <= -1 and
    rho_n^- = (q^{(2n+1)/2}) for n >= 0, in two-sided indices.
    """
    T = params.window
    root = exact_sqrt(params.q)
    plus, minus = [], []
    for i in range(2 * T + 1):
        n = i - T - 1
        plus.append(Specialization((root ** (-(2 * n + 1)),)) if n <= -1 else Specialization())
    for j in range(1, 2 * T + 2):
        n = j - T - 1
        minus.append(Specialization((root ** (2 * n + 1),)) if n >= 0 else Specialization())
    return SpecializationChain(tuple(plus), tuple(minus))


def mq_sequence(pi: StrictPlanePartition, window: int) -> List[StrictPartition]:
    """Diagonals lambda^{-T}, ..., lambda^{T} of pi as a one-sided sequence."""
    if max(pi.t_left, pi.t_right) > window:
        raise ValueError(f"pi has diagonals outside the window [-{window}, {window}]")
    return [pi.diagonal(t) for t in range(-window, window + 1)]


def mq_weight(pi: StrictPlanePartition, q: Scalar, verify: bool = False) -> Scalar:
    """
    2^{A(pi)} q^{|pi|}.

    With verify=True the value is recomputed as the mu-sum of process weights
    on the chain covering pi's diagonals, and a mismatch raises ArithmeticError.
    """
    q = parse_scalar(q)
    value = power_of_two(alternation(pi), is_exact([q])) * q ** pi.volume
    if verify:
        via_chain = mq_weight_via_chain(pi, q)
        if is_exact([q]) and is_exact([via_chain]):
            same = value == via_chain
        else:
            same = math.isclose(float(value), float(via_chain), rel_tol=1e-12, abs_tol=0.0)
        if not same:
            raise ArithmeticError(f"2^A q^|pi| = {value} but the process weight is {via_chain}")
    return value


def mq_weight_via_chain(pi: StrictPlanePartition, q: Scalar) -> Scalar:
    window = max(pi.t_left, pi.t_right, 1)
    params = MqParams(q, window)
    return marginal_weight(mq_sequence(pi, window), mq_chain(params))


def mq_partition_function(params: MqParams) -> Scalar:
    """
    Z of the windowed chain: prod over a in [-T-1, -1], b in [0, T] of
    (1 + q^{b-a}) / (1 - q^{b-a}). Tends to the MacMahon product as T grows.
    """
    q, T = params.q, params.window
    result = unit(params.exact)
    for a in range(-T - 1, 0):
        for b in range(0, T + 1):
            qn = q ** (b - a)
            result *= (1 + qn) / (1 - qn)
    return result


def _truncated_mul(a: List[int], b: List[int], n: int) -> List[int]:
    out = [0] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j in range(0, n + 1 - i):
                out[i + j] += ai * b[j]
    return out


def macmahon_coeffs(max_n: int, cap: Optional[int] = None) -> List[int]:
    """First max_n + 1 coefficients of prod_{n>=1} ((1 + q^n) / (1 - q^n))^n, exact."""
    cap = settings.get("enumeration_cap") if cap is None else cap
    if max_n < 0 or max_n > cap:
        raise CapExceeded(f"max_n must lie in [0, {cap}], got {max_n}")
    series = [1] + [0] * max_n
    for n in range(1, max_n + 1):
        # (1 + q^n) / (1 - q^n) = 1 + 2 sum_k q^{nk}
        factor = [0] * (max_n + 1)
        factor[0] = 1
        for k in range(n, max_n + 1, n):
            factor[k] = 2
        for _ in range(n):
            series = _truncated_mul(series, factor, max_n)
    return series


def macmahon_by_enumeration(max_n: int, cap: Optional[int] = None) -> List[int]:
    """sum_{|pi| = n} 2^{A(pi)} for n <= max_n, by enumeration."""
    counts = [0] * (max_n + 1)
    for pi in enumerate_spp(max_n, cap):
        counts[pi.volume] += 2 ** alternation(pi)
    return counts


def macmahon_product(q: Scalar, terms: Optional[int] = None) -> float:
    """Numeric value of prod_{n>=1} ((1 + q^n) / (1 - q^n))^n."""
    q = float(q)
    if terms is None:
        terms = max(1, math.ceil(math.log(settings.get("series_epsilon")) / math.log(q)) * 2)
    n = np.arange(1, terms + 1, dtype=float)
    qn = q ** n
    return float(np.exp(np.sum(n * (np.log1p(qn) - np.log1p(-qn)))))


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the process module."""
    s, t = Fraction(1, 3), Fraction(1, 4)
    chain = SpecializationChain((Specialization((s,)),), (Specialization((t,)),))
    q = Fraction(1, 4)
    fig = from_diagonals({
        -3: (2,), -2: (3, 2), -1: (4, 3, 1), 0: (5, 3, 2),
        1: (3, 2), 2: (2, 1), 3: (1,), 4: (1,),
    })
    checks = {
        "single_step_weight": weight_w([(1,)], [], chain) == 2 * s * t,
        "single_step_z": partition_function(chain) == (1 + s * t) / (1 - s * t),
        "macmahon_low_order": macmahon_coeffs(3) == [1, 2, 6, 16],
        "macmahon_matches_enumeration": macmahon_coeffs(6) == macmahon_by_enumeration(6),
        "figure_weight": mq_weight(fig, q) == 2 ** 7 * q ** 35,
    }
    ok = True
    for pi in enumerate_spp(4):
        ok = ok and mq_weight(pi, q) == mq_weight_via_chain(pi, q)
    checks["weight_equals_process_weight"] = ok
    error_handler.log_debug(f"{sum(checks.values())}/{len(checks)} checks passed", "process.self_test")
    return checks

