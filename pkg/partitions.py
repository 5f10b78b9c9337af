"""
Strict Partitions Module

Strict partitions, strict plane partitions and their plane diagrams.
A strict plane partition is stored as its matrix (rows of nonincreasing
positive entries); the diagonal view lambda^t, t = j - i, is derived.
"""

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from error_handler import (
    CapExceeded,
    DiagonalNotStrict,
    InvalidPartition,
    InvalidPoints,
    NotAPlanePartition,
    error_handler,
)
from settings import settings


def _as_int(value: Any, error_cls, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise error_cls(f"{what} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class StrictPartition:
    """Strictly decreasing sequence of positive integers."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = [_as_int(p, InvalidPartition, "part") for p in self.parts]
        # Trailing zeros are allowed on input, as in (5, 3, 2, 0, 0, ...)
        while parts and parts[-1] == 0:
            parts.pop()
        for i, p in enumerate(parts):
            if p <= 0:
                raise InvalidPartition(f"parts must be positive: {tuple(parts)}")
            if i and parts[i - 1] <= p:
                raise InvalidPartition(f"parts must be strictly decreasing: {tuple(parts)}")
        object.__setattr__(self, "parts", tuple(parts))

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def part(self, i: int) -> int:
        """The i-th part (0-based), zero beyond the length."""
        return self.parts[i] if i < len(self.parts) else 0

    def contains(self, other: "StrictPartition") -> bool:
        """True when other is a subset of self (mu_i <= lambda_i for every i)."""
        if other.length > self.length:
            return False
        return all(m <= l for m, l in zip(other.parts, self.parts))

    def shifted_diagram(self) -> List[Tuple[int, int]]:
        """Boxes (i, j), 1-based, with i <= j <= lambda_i + i - 1."""
        return [(i, j) for i, p in enumerate(self.parts, start=1) for j in range(i, p + i)]

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def to_json(self) -> str:
        return json.dumps(list(self.parts))

    @classmethod
    def from_json(cls, data: Union[str, Sequence[int]]) -> "StrictPartition":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, list):
            raise InvalidPartition(f"expected a JSON array, got {data!r}")
        return cls(tuple(data))


EMPTY = StrictPartition()


def as_partition(value: Union[StrictPartition, Sequence[int]]) -> StrictPartition:
    """Coerce a tuple/list of parts to a StrictPartition."""
    return value if isinstance(value, StrictPartition) else StrictPartition(tuple(value))


class SkewStats(NamedTuple):
    contains: bool
    horizontal_strip: bool
    a: int


def _shifted_components(lam: StrictPartition, mu: StrictPartition) -> int:
    boxes = set(lam.shifted_diagram()) - set(mu.shifted_diagram())
    if not boxes:
        return 0
    rows = max(i for i, _ in boxes) + 1
    cols = max(j for _, j in boxes) + 1
    grid = np.zeros((rows, cols), dtype=bool)
    for i, j in boxes:
        grid[i, j] = True
    _, count = ndimage.label(grid)
    return int(count)


def skew_strip_stats(lam: StrictPartition, mu: StrictPartition) -> SkewStats:
    """
    Containment, horizontal-strip flag and number of border strips of lam - mu.

    The strip test is the column rule on the (unshifted) skew diagram, i.e.
    the interlacing lam_1 >= mu_1 >= lam_2 >= mu_2 >= ... . When it holds,
    a(lam - mu) counts the columns holding a box with no box to their right;
    otherwise a counts connected components of the shifted skew diagram.
    """
    lam, mu = as_partition(lam), as_partition(mu)
    if not lam.contains(mu):
        return SkewStats(False, False, 0)

    strip = all(lam.part(i + 1) <= mu.part(i) for i in range(lam.length))
    if not strip:
        return SkewStats(True, False, _shifted_components(lam, mu))

    columns = set()
    for i in range(lam.length):
        columns.update(range(mu.part(i) + 1, lam.part(i) + 1))
    a = sum(1 for c in columns if c + 1 not in columns)
    return SkewStats(True, True, a)


@dataclass(frozen=True)
class PointConfiguration:
    """Finite set of points (t, x) of the plane diagram space, x > 0."""

    points: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        pts = []
        for p in self.points:
            if len(p) != 2:
                raise InvalidPoints(f"point must be a (t, x) pair: {p!r}")
            t = _as_int(p[0], InvalidPoints, "t")
            x = _as_int(p[1], InvalidPoints, "x")
            if x <= 0:
                raise InvalidPoints(f"parts must be positive: {(t, x)}")
            pts.append((t, x))
        if len(set(pts)) != len(pts):
            raise InvalidPoints(f"duplicate points in {pts}")
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.points)

    def canonical(self) -> "PointConfiguration":
        """Same set, sorted by (t, x)."""
        return PointConfiguration(tuple(sorted(self.points)))

    @property
    def as_set(self) -> frozenset:
        return frozenset(self.points)

    def to_json(self) -> str:
        return json.dumps([list(p) for p in self.points])

    @classmethod
    def from_json(cls, data: Union[str, Sequence[Sequence[int]]]) -> "PointConfiguration":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, list):
            raise InvalidPoints(f"expected a JSON array of [t, x] pairs, got {data!r}")
        return cls(tuple(tuple(p) for p in data))


@dataclass(frozen=True)
class StrictPlanePartition:
    """
    Plane partition whose diagonals are strict partitions.

    `rows` holds the matrix view with zeros trimmed. Build instances from
    untrusted data with validate_spp / from_diagonals.
    """

    rows: Tuple[Tuple[int, ...], ...] = ()

    @property
    def volume(self) -> int:
        return sum(sum(row) for row in self.rows)

    @property
    def t_left(self) -> int:
        """T_L: largest |t| of a nonempty diagonal with t <= 0."""
        return max(len(self.rows) - 1, 0)

    @property
    def t_right(self) -> int:
        """T_R: largest t of a nonempty diagonal with t >= 0."""
        return max(len(self.rows[0]) - 1, 0) if self.rows else 0

    def entry(self, i: int, j: int) -> int:
        """pi(i, j), 0-based, zero outside the support."""
        if 0 <= i < len(self.rows) and 0 <= j < len(self.rows[i]):
            return self.rows[i][j]
        return 0

    def diagonal(self, t: int) -> StrictPartition:
        """lambda^t: the entries pi(i, j) with j - i = t."""
        parts = []
        i = max(0, -t)
        while self.entry(i, i + t) > 0:
            parts.append(self.entry(i, i + t))
            i += 1
        return StrictPartition(tuple(parts))

    def diagonals(self) -> Dict[int, StrictPartition]:
        """All diagonals from -T_L to T_R."""
        if not self.rows:
            return {}
        return {t: self.diagonal(t) for t in range(-self.t_left, self.t_right + 1)}

    def as_array(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, 0), dtype=np.int64)
        out = np.zeros((len(self.rows), len(self.rows[0])), dtype=np.int64)
        for i, row in enumerate(self.rows):
            out[i, :len(row)] = row
        return out

    def to_json(self) -> str:
        return json.dumps([list(row) for row in self.rows])

    @classmethod
    def from_json(cls, data: Union[str, Sequence[Sequence[int]]]) -> "StrictPlanePartition":
        if isinstance(data, str):
            data = json.loads(data)
        return validate_spp(data)


def validate_spp(matrix: Sequence[Sequence[int]]) -> StrictPlanePartition:
    """
    Validate a matrix view and return the strict plane partition.

    Raises NotAPlanePartition when an entry is negative or a row/column
    increases, DiagonalNotStrict when a diagonal repeats a positive value.
    """
    if isinstance(matrix, np.ndarray):
        matrix = matrix.tolist()
    if not isinstance(matrix, (list, tuple)):
        raise NotAPlanePartition(f"expected an array of rows, got {matrix!r}")

    grid = []
    for row in matrix:
        if not isinstance(row, (list, tuple)):
            raise NotAPlanePartition(f"row must be an array: {row!r}")
        values = [_as_int(v, NotAPlanePartition, "entry") for v in row]
        if any(v < 0 for v in values):
            raise NotAPlanePartition(f"entries must be nonnegative: {values}")
        grid.append(values)

    width = max((len(r) for r in grid), default=0)
    a = np.zeros((len(grid), width), dtype=np.int64)
    for i, row in enumerate(grid):
        a[i, :len(row)] = row

    if a.size:
        if np.any(np.diff(a, axis=1) > 0):
            raise NotAPlanePartition("a row increases")
        if np.any(np.diff(a, axis=0) > 0):
            raise NotAPlanePartition("a column increases")
        inner = a[1:, 1:]
        if np.any((inner > 0) & (inner >= a[:-1, :-1])):
            raise DiagonalNotStrict("a diagonal repeats a positive value")

    rows = []
    for row in a.tolist():
        trimmed = tuple(v for v in row if v > 0)
        if not trimmed:
            break
        rows.append(trimmed)
    return StrictPlanePartition(tuple(rows))


def from_diagonals(diagonals: Mapping[int, Union[StrictPartition, Sequence[int]]]) -> StrictPlanePartition:
    """Assemble pi from its diagonals {t: lambda^t} and validate condpp."""
    cells: Dict[Tuple[int, int], int] = {}
    for t, lam in diagonals.items():
        lam = as_partition(lam)
        for k, part in enumerate(lam.parts):
            i, j = (k, k + t) if t >= 0 else (k - t, k)
            cells[(i, j)] = part
    if not cells:
        return StrictPlanePartition()
    rows = max(i for i, _ in cells) + 1
    cols = max(j for _, j in cells) + 1
    matrix = [[cells.get((i, j), 0) for j in range(cols)] for i in range(rows)]
    spp = validate_spp(matrix)
    # A gap inside a diagonal shows up as a lost part
    if spp.volume != sum(cells.values()):
        raise NotAPlanePartition("diagonals do not describe a plane partition")
    return spp


def plane_diagram(pi: StrictPlanePartition) -> PointConfiguration:
    """{(t, x): x is a part of lambda^t}."""
    points = [(j - i, v) for i, row in enumerate(pi.rows) for j, v in enumerate(row)]
    return PointConfiguration(tuple(sorted(points)))


def from_plane_diagram(points: Union[PointConfiguration, Iterable[Tuple[int, int]]]) -> StrictPlanePartition:
    """Inverse of plane_diagram."""
    by_time: Dict[int, List[int]] = defaultdict(list)
    for t, x in points:
        by_time[t].append(x)
    return from_diagonals({t: tuple(sorted(xs, reverse=True)) for t, xs in by_time.items()})


def _components(pi: StrictPlanePartition) -> int:
    a = pi.as_array()
    total = 0
    for value in np.unique(a[a > 0]):
        _, count = ndimage.label(a == value)
        total += int(count)
    return total


def _diagonal_formula(pi: StrictPlanePartition) -> int:
    if not pi.rows:
        return 0
    lam = pi.diagonals()
    t_left, t_right = pi.t_left, pi.t_right

    def diag(t: int) -> StrictPartition:
        return lam.get(t, StrictPartition())

    total = 0
    for i in range(1, t_right + 2):
        total += skew_strip_stats(diag(i - 1), diag(i)).a
    for i in range(0, -t_left - 1, -1):
        total += skew_strip_stats(diag(i), diag(i - 1)).a
    return total - diag(0).length


def alternation(pi: StrictPlanePartition, method: str = "diagonal-formula") -> int:
    """
    A(pi), the number of side-connected constant-value regions of pi.

    method="diagonal-formula" sums border strips of consecutive diagonals;
    method="components" labels the regions of the matrix directly.
    """
    if method == "diagonal-formula":
        return _diagonal_formula(pi)
    if method == "components":
        return _components(pi)
    raise ValueError(f"unknown alternation method: {method}")


def _grow(rows: List[List[int]], budget: int) -> Iterator[StrictPlanePartition]:
    r = len(rows) - 1
    row = rows[r]
    c = len(row)

    if c == 0:
        yield StrictPlanePartition(tuple(tuple(x) for x in rows[:-1]))
    else:
        rows.append([])
        yield from _grow(rows, budget)
        rows.pop()

    bound = budget
    if c > 0:
        bound = min(bound, row[c - 1])
    if r > 0:
        above = rows[r - 1]
        bound = min(bound, above[c] if c < len(above) else 0)
        if c > 0:
            bound = min(bound, above[c - 1] - 1)

    for v in range(1, bound + 1):
        row.append(v)
        yield from _grow(rows, budget - v)
        row.pop()


def enumerate_spp(max_volume: int, cap: Optional[int] = None) -> Iterator[StrictPlanePartition]:
    """
    Yield every strict plane partition with |pi| <= max_volume exactly once.

    Depth-first over cells in row-major order, pruning on the remaining
    volume, the row/column bounds and diagonal strictness.
    """
    cap = settings.get("enumeration_cap") if cap is None else cap
    max_volume = _as_int(max_volume, CapExceeded, "max_volume")
    if max_volume < 0:
        raise CapExceeded(f"max_volume must be nonnegative, got {max_volume}")
    if max_volume > cap:
        raise CapExceeded(f"max_volume {max_volume} exceeds the enumeration cap {cap}")
    error_handler.log_debug(f"enumerating strict plane partitions up to volume {max_volume}", "enumerate_spp")
    yield from _grow([[]], max_volume)


def _strict_below(max_part: int, budget: int) -> Iterator[Tuple[int, ...]]:
    yield ()
    for first in range(min(max_part, budget), 0, -1):
        for rest in _strict_below(first - 1, budget - first):
            yield (first,) + rest


def strict_partitions(max_weight: int) -> List[StrictPartition]:
    """All strict partitions with |lambda| <= max_weight, by weight then parts."""
    found = sorted(_strict_below(max_weight, max_weight), key=lambda p: (sum(p), p))
    return [StrictPartition(p) for p in found]


def strict_partitions_inside(bound: Sequence[int]) -> Iterator[StrictPartition]:
    """Strict mu with mu_i <= bound_i; the length of mu is at most len(bound)."""
    bound = list(bound)

    def walk(i: int, ceiling: int) -> Iterator[Tuple[int, ...]]:
        yield ()
        if i >= len(bound):
            return
        for first in range(min(bound[i], ceiling), 0, -1):
            for rest in walk(i + 1, first - 1):
                yield (first,) + rest

    for parts in walk(0, max(bound, default=0)):
        yield StrictPartition(parts)


def self_test() -> Dict[str, bool]:
    """Quick invariant checks for the partitions module."""
    fig = from_diagonals({
        -3: (2,), -2: (3, 2), -1: (4, 3, 1), 0: (5, 3, 2),
        1: (3, 2), 2: (2, 1), 3: (1,), 4: (1,),
    })
    checks = {
        "figure_volume": fig.volume == 35,
        "figure_alternation": alternation(fig, "diagonal-formula") == 7 == alternation(fig, "components"),
        "skew_example": skew_strip_stats(StrictPartition((5, 3, 2)), StrictPartition((4, 1))) == (True, False, 2),
    }
    agree = True
    weighted = [0] * 7
    for pi in enumerate_spp(6):
        a = alternation(pi, "diagonal-formula")
        agree = agree and a == alternation(pi, "components")
        agree = agree and from_plane_diagram(plane_diagram(pi)) == pi
        weighted[pi.volume] += 2 ** a
    checks["alternation_methods_agree"] = agree
    checks["weighted_counts"] = weighted[:4] == [1, 2, 6, 16]
    return checks
