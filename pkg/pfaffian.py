"""
Pfaffian Module

Pfaffians of even-dimensional skew-symmetric matrices: a combinatorial
reference summing over perfect matchings and a pivoted Parlett-Reid
tridiagonalization in O(n^3).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union

import numpy as np

from error_handler import OddDimension, TooLarge
from settings import settings


@dataclass(frozen=True, eq=False)
class SkewSymmetricMatrix:
    """
    Skew-symmetric matrix held by its strict upper triangle.

    Entries below the diagonal are never read; the full matrix is rebuilt as
    U - U^T on demand.
    """

    upper: np.ndarray

    def __post_init__(self):
        upper = np.asarray(self.upper)
        if upper.ndim != 2 or upper.shape[0] != upper.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {upper.shape}")
        object.__setattr__(self, "upper", np.triu(upper, k=1))

    @property
    def dimension(self) -> int:
        return self.upper.shape[0]

    def __getitem__(self, index: Tuple[int, int]):
        i, j = index
        if i < j:
            return self.upper[i, j]
        if i > j:
            return -self.upper[j, i]
        return self.upper.dtype.type(0)

    def to_array(self) -> np.ndarray:
        return self.upper - self.upper.T

    @classmethod
    def from_array(cls, array: np.ndarray, atol: float = 0.0) -> "SkewSymmetricMatrix":
        """Build from a full matrix, rejecting it when A + A^T exceeds atol."""
        array = np.asarray(array)
        if array.ndim == 2 and array.shape[0] == array.shape[1]:
            if np.max(np.abs(array + array.T), initial=0.0) > atol:
                raise ValueError("matrix is not skew-symmetric")
        return cls(array)


Matrix = Union[SkewSymmetricMatrix, np.ndarray]


def _as_array(A: Matrix) -> np.ndarray:
    if isinstance(A, SkewSymmetricMatrix):
        return A.to_array()
    return SkewSymmetricMatrix.from_array(A, atol=np.inf).to_array()


def _check_even(n: int) -> None:
    if n % 2:
        raise OddDimension(f"Pfaffian needs an even dimension, got {n}")


def pfaffian_reference(A: Matrix, cap: Optional[int] = None):
    """
    Signed sum over perfect matchings, by expansion along the first row:
    Pf(A) = sum_j (-1)^j a_{1j} Pf(A with rows/columns 1 and j removed), 1-based.
    """
    cap = settings.get("pfaffian_reference_cap") if cap is None else cap
    a = _as_array(A)
    n = a.shape[0]
    _check_even(n)
    if n > cap:
        raise TooLarge(f"dimension {n} exceeds the reference cap {cap}")

    @lru_cache(maxsize=None)
    def pf(indices: Tuple[int, ...]):
        if not indices:
            return 1
        first, rest = indices[0], indices[1:]
        total = 0
        for k, j in enumerate(rest):
            entry = a[first, j]
            if entry:
                sign = 1 if k % 2 == 0 else -1
                total += sign * entry * pf(rest[:k] + rest[k + 1:])
        return total

    return pf(tuple(range(n)))


def pfaffian(A: Matrix) -> float:
    """
    Pfaffian by Parlett-Reid tridiagonalization with partial pivoting.

    Each step moves the largest entry of the current column below the
    diagonal into position (k+1, k), flipping the sign for the swap, then
    eliminates the trailing block with a rank-two update.
    """
    a = _as_array(A)
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[0]
    _check_even(n)

    result = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1:, k]).argmax())
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            result *= -1
        if a[k + 1, k] == 0.0:
            return 0.0
        result *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1])
            a[k + 2:, k + 2:] -= np.outer(a[k + 2:, k + 1], tau)
    return result


def random_skew(dimension: int, rng: Optional[np.random.Generator] = None) -> SkewSymmetricMatrix:
    """Skew-symmetric matrix with standard normal upper entries."""
    rng = np.random.default_rng() if rng is None else rng
    return SkewSymmetricMatrix(rng.standard_normal((dimension, dimension)))


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the pfaffian module."""
    rng = np.random.default_rng(7)
    blocks = np.kron(np.eye(3), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    six = random_skew(6, rng)
    ten = random_skew(10, rng)
    det = np.linalg.det(six.to_array())
    return {
        "block_diagonal": bool(abs(pfaffian(blocks) - 1.0) < 1e-15),
        "square_is_determinant": bool(abs(pfaffian(six) ** 2 - det) <= 1e-10 * abs(det)),
        "matches_reference": bool(abs(pfaffian(ten) - pfaffian_reference(ten)) <= 1e-12 * max(1.0, abs(pfaffian(ten)))),
    }
