"""Instances, tours, distance conventions and candidate neighbor lists."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidTourError

GROUPS = ("rue", "netgen", "morphed", "tspgen", "evolved-easy-A", "evolved-easy-B", "custom")


class DistanceMode(str, enum.Enum):
    ROUNDED = "rounded-euclidean"
    EXACT = "exact-euclidean"


class Point(NamedTuple):
    x: float
    y: float


def _round_half_up(d):
    return np.floor(d + 0.5)


def distance(a: Sequence[float], b: Sequence[float], mode: DistanceMode = DistanceMode.ROUNDED) -> float:
    """Distance between two points under ``mode``.

    Rounded mode is the TSPLIB EUC_2D convention: nearest integer, halves up.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    if not all(math.isfinite(v) for v in (ax, ay, bx, by)):
        raise InvalidInputError(f"non-finite coordinate in {a!r} / {b!r}")
    d = math.hypot(ax - bx, ay - by)
    if DistanceMode(mode) is DistanceMode.ROUNDED:
        return float(math.floor(d + 0.5))
    return d


def distance_matrix(coords: np.ndarray, mode: DistanceMode = DistanceMode.ROUNDED) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    if DistanceMode(mode) is DistanceMode.ROUNDED:
        d = _round_half_up(d)
    return d


@dataclass(frozen=True, eq=False)
class Instance:
    """A Euclidean TSP instance: ``n`` planar points plus a distance convention.

    Coordinates are held as an ``(n, 2)`` float array. Derived structures
    (distance matrix, neighbor lists) are computed lazily and cached.
    """

    id: str
    coords: np.ndarray
    group: str = "custom"
    metric: DistanceMode = DistanceMode.ROUNDED
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InvalidInputError(f"coords must have shape (n, 2), got {coords.shape}")
        if coords.shape[0] < 3:
            raise InvalidInputError(f"an instance needs at least 3 cities, got {coords.shape[0]}")
        if not np.all(np.isfinite(coords)):
            raise InvalidInputError("non-finite coordinates")
        if self.group not in GROUPS:
            raise InvalidInputError(f"unknown group {self.group!r}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "metric", DistanceMode(self.metric))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.coords]

    @cached_property
    def dist(self) -> np.ndarray:
        d = distance_matrix(self.coords, self.metric)
        d.setflags(write=False)
        return d

    @cached_property
    def dist_rows(self) -> list[list[float]]:
        # nested lists index ~3x faster than ndarray scalars in the solver inner loops
        return self.dist.tolist()

    def neighbors(self, k: int) -> "NeighborLists":
        cache = self.__dict__.setdefault("_nl_cache", {})
        if k not in cache:
            cache[k] = build_neighbor_lists(self, k)
        return cache[k]

    def has_duplicates(self) -> bool:
        return len(np.unique(self.coords, axis=0)) != self.n

    def with_meta(self, **extra) -> "Instance":
        return Instance(self.id, self.coords, self.group, self.metric, {**self.meta, **extra})


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(c) for c in self.order))

    @classmethod
    def from_order(cls, inst: Instance, order: Iterable[int]) -> "Tour":
        order = tuple(int(c) for c in order)
        return cls(order, tour_length(inst, order))

    def __len__(self):
        return len(self.order)

    def edges(self) -> set[tuple[int, int]]:
        return tour_edges(self.order)


def tour_edges(order: Sequence[int]) -> set[tuple[int, int]]:
    n = len(order)
    out = set()
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        out.add((a, b) if a < b else (b, a))
    return out


@dataclass(frozen=True)
class TourReport:
    ok: bool
    duplicates: tuple[int, ...] = ()
    missing: tuple[int, ...] = ()
    wrong_length: bool = False
    out_of_range: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


def validate_tour(inst: Instance | int, t: Tour | Sequence[int]) -> TourReport:
    n = inst if isinstance(inst, int) else inst.n
    order = t.order if isinstance(t, Tour) else tuple(t)
    seen = {}
    for c in order:
        seen[c] = seen.get(c, 0) + 1
    duplicates = tuple(sorted(c for c, k in seen.items() if k > 1))
    out_of_range = tuple(sorted(c for c in seen if not (isinstance(c, (int, np.integer)) and 0 <= c < n)))
    missing = tuple(c for c in range(n) if c not in seen)
    wrong_length = len(order) != n
    ok = not (duplicates or missing or wrong_length or out_of_range)
    return TourReport(ok, duplicates, missing, wrong_length, out_of_range)


def tour_length(inst: Instance, t: Tour | Sequence[int]) -> float:
    order = t.order if isinstance(t, Tour) else t
    report = validate_tour(inst, order)
    if not report.ok:
        raise InvalidTourError(f"invalid tour: {report}")
    idx = np.asarray(order, dtype=np.int64)
    return float(inst.dist[idx, np.roll(idx, -1)].sum())


@dataclass(frozen=True)
class NeighborLists:
    k: int
    lists: tuple[tuple[int, ...], ...]

    def __getitem__(self, city: int) -> tuple[int, ...]:
        return self.lists[city]

    def __len__(self):
        return len(self.lists)


def build_neighbor_lists(inst: Instance, k: int) -> NeighborLists:
    """k nearest other cities per city, ascending distance, ties by lower index."""
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    n = inst.n
    m = min(k, n - 1)
    # stable sort keeps ascending index order among equal distances
    order = np.argsort(inst.dist, axis=1, kind="stable")
    lists = []
    for c in range(n):
        row = order[c]
        lists.append(tuple(int(j) for j in row[row != c][:m]))
    return NeighborLists(k, tuple(lists))


def within_factor(length: float, ref: float, alpha: float) -> bool:
    """``length <= (1 + alpha) * ref`` evaluated as ``length <= ref + alpha * ref``."""
    return length <= ref + alpha * ref
