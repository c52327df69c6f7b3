"""Clustering instances, the intra-cluster cost, and exhaustive oracles.

The oracles enumerate every cluster assignment of a small instance and are
the classical reference that annealing results are certified against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import SizeGuardError
from .spin import BasisIndex

#: Hard cap for exhaustive enumeration (K**n assignments).
ORACLE_MAX_POINTS = 12

#: Additional cap on the number of enumerated assignments (large K guard).
ORACLE_MAX_ASSIGNMENTS = 5_000_000


@dataclass(frozen=True)
class PointSet:
    """Ordered 2-D points with dense 0-based indices."""

    points: tuple[tuple[float, float], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError("a clustering instance needs at least 2 points")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(pts):
                raise ValueError("labels and points must have the same length")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.points)


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Euclidean distance between two points in the plane."""
    return math.hypot(p[0] - q[0], p[1] - q[1])


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric matrix of pairwise Euclidean distances."""

    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.allclose(d, d.T, atol=0.0):
            raise ValueError("distance matrix must be symmetric")
        if np.any(d < 0.0) or np.any(np.diag(d) != 0.0):
            raise ValueError("distances must be non-negative with a zero diagonal")
        d.flags.writeable = False
        object.__setattr__(self, "d", d)

    @property
    def n_points(self) -> int:
        return self.d.shape[0]

    @property
    def max_distance(self) -> float:
        return float(self.d.max())

    @property
    def total_pair_sum(self) -> float:
        """Sum of all unordered pair distances."""
        n = self.n_points
        return math.fsum(
            self.d[i, j] for i in range(n) for j in range(i + 1, n)
        )


def distance_matrix(points: PointSet | Sequence[Sequence[float]]) -> DistanceMatrix:
    """Pairwise distance matrix of a point set."""
    pts = points.points if isinstance(points, PointSet) else tuple(points)
    n = len(pts)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = distance(pts[i], pts[j])
    return DistanceMatrix(d=d)


class Partition:
    """Cluster assignment of points, compared as a set partition.

    Two partitions are equal exactly when they group the points identically,
    regardless of which labels name the clusters.
    """

    __slots__ = ("labels", "n_clusters", "_canonical")

    def __init__(self, labels: Iterable[int], n_clusters: int):
        labels = tuple(int(l) for l in labels)
        if n_clusters < 1:
            raise ValueError("cluster count must be at least 1")
        if any(l < 0 or l >= n_clusters for l in labels):
            raise ValueError(f"labels must lie in [0, {n_clusters})")
        self.labels = labels
        self.n_clusters = n_clusters
        seen: dict[int, int] = {}
        self._canonical = tuple(seen.setdefault(l, len(seen)) for l in labels)

    @property
    def canonical(self) -> tuple[int, ...]:
        """Labels relabeled by order of first appearance."""
        return self._canonical

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Point indices grouped by cluster, in order of first appearance."""
        groups: dict[int, list[int]] = {}
        for i, l in enumerate(self._canonical):
            groups.setdefault(l, []).append(i)
        return tuple(tuple(groups[l]) for l in sorted(groups))

    def describe(self, points: PointSet) -> str:
        """Human-readable block listing, using display labels when present."""
        def name(i: int) -> str:
            if points.labels is not None:
                return points.labels[i]
            return _fmt_point(points.points[i])

        parts = []
        for block in self.blocks():
            parts.append("{" + ", ".join(name(i) for i in block) + "}")
        return " | ".join(parts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._canonical == other._canonical

    def __hash__(self) -> int:
        return hash(self._canonical)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"Partition({list(self.labels)}, n_clusters={self.n_clusters})"


def _fmt_point(p: tuple[float, float]) -> str:
    def num(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else f"{v:g}"

    return f"({num(p[0])},{num(p[1])})"


def cost(dm: DistanceMatrix, partition: Partition) -> float:
    """Total distance over unordered same-cluster point pairs."""
    labels = partition.labels
    n = dm.n_points
    if len(labels) != n:
        raise ValueError(
            f"partition covers {len(labels)} points, distance matrix has {n}"
        )
    return math.fsum(
        dm.d[i, j]
        for i in range(n)
        for j in range(i + 1, n)
        if labels[i] == labels[j]
    )


def enumerate_assignments(
    n_points: int,
    K: int,
    fixed: Mapping[int, int] | None = None,
) -> Iterator[Partition]:
    """Yield every K-labeling of the points that honors the fixed labels."""
    fixed = dict(fixed or {})
    for p, l in fixed.items():
        if not 0 <= p < n_points:
            raise ValueError(f"fixed point {p} out of range")
        if not 0 <= l < K:
            raise ValueError(f"fixed label {l} out of range [0, {K})")
    free = [i for i in range(n_points) if i not in fixed]
    base = [0] * n_points
    for p, l in fixed.items():
        base[p] = l
    for combo in itertools.product(range(K), repeat=len(free)):
        labels = base.copy()
        for p, l in zip(free, combo):
            labels[p] = l
        yield Partition(labels, K)


@dataclass(frozen=True)
class OracleResult:
    """Exact minimum found by enumeration.

    ``argmin_partitions`` holds the optimal assignments deduplicated up to
    cluster relabeling; ``argmin_basis_states`` is filled when the query was
    over a Hamiltonian diagonal.
    """

    min_cost: float
    argmin_partitions: tuple[Partition, ...] = ()
    argmin_basis_states: tuple[BasisIndex, ...] = ()


def oracle_min(
    dm: DistanceMatrix,
    K: int,
    fixed: Mapping[int, int] | None = None,
    rel_tol: float = 1e-9,
) -> OracleResult:
    """Exact minimum of the cost over all assignments, by brute force."""
    n = dm.n_points
    if n > ORACLE_MAX_POINTS:
        raise SizeGuardError(
            f"{n} points exceeds the enumeration guard of {ORACLE_MAX_POINTS}"
        )
    n_free = n - len(fixed or {})
    if K**n_free > ORACLE_MAX_ASSIGNMENTS:
        raise SizeGuardError(
            f"{K}**{n_free} assignments exceed the enumeration guard of "
            f"{ORACLE_MAX_ASSIGNMENTS}"
        )
    best = math.inf
    argmin: set[Partition] = set()
    for p in enumerate_assignments(n, K, fixed):
        w = cost(dm, p)
        tol = rel_tol * (1.0 + abs(w if math.isinf(best) else best))
        if w < best - tol:
            best = w
            argmin = {p}
        elif w <= best + tol:
            argmin.add(p)
            best = min(best, w)
    ordered = tuple(sorted(argmin, key=lambda p: p.canonical))
    return OracleResult(min_cost=best, argmin_partitions=ordered)


def oracle_diag_min(h_diag, rel_tol: float = 1e-9) -> OracleResult:
    """Minimum entry of a Hamiltonian diagonal and all basis states attaining it.

    Accepts a plain vector or anything exposing a ``diag`` attribute; the
    length must be a power of 3.  Entries within ``rel_tol`` of the minimum
    count as degenerate.
    """
    diag = np.asarray(getattr(h_diag, "diag", h_diag), dtype=float)
    dim = diag.shape[0]
    n = max(1, round(math.log(dim, 3)))
    if diag.ndim != 1 or 3**n != dim:
        raise ValueError(f"diagonal length {dim} is not a power of 3")
    mn = float(diag.min())
    idx = np.flatnonzero(diag <= mn + rel_tol * (1.0 + abs(mn)))
    states = tuple(BasisIndex.from_linear(int(i), n) for i in idx)
    return OracleResult(min_cost=mn, argmin_basis_states=states)
