"""Finite metric spaces and the elementary operations on them.

Points are identified by 0-based integer indices; labels are display-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import DomainError, MetricValidationError, StructuralInputError

#: Absolute tolerance for metric-axiom and equality checks.
TOL = 1e-9

#: Above this many points a coordinate-backed space computes rows on demand.
DEFAULT_DENSE_LIMIT = 2048


def _pairwise(coords: np.ndarray, metric: str) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return _reduce_diff(diff, metric)


def _reduce_diff(diff: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == "l1":
        return np.sum(np.abs(diff), axis=-1)
    if metric == "linf":
        return np.max(np.abs(diff), axis=-1)
    raise DomainError(f"unknown metric {metric!r}; expected euclidean, l1 or linf")


@dataclass(frozen=True)
class MetricValidationReport:
    symmetry_violations: list = field(default_factory=list)
    triangle_violations: list = field(default_factory=list)
    diagonal_violations: list = field(default_factory=list)
    positivity_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.symmetry_violations
            or self.triangle_violations
            or self.diagonal_violations
            or self.positivity_violations
        )

    def __bool__(self) -> bool:
        # truthy when there is something to report
        return not self.ok

    def summary(self, limit: int = 5) -> str:
        if self.ok:
            return "metric ok"
        parts = []
        for name in ("diagonal", "symmetry", "positivity", "triangle"):
            items = getattr(self, f"{name}_violations")
            if items:
                shown = ", ".join(str(v) for v in items[:limit])
                more = f" (+{len(items) - limit} more)" if len(items) > limit else ""
                parts.append(f"{len(items)} {name} violation(s): {shown}{more}")
        return "; ".join(parts)

    def to_dict(self) -> dict:
        return {
            "diagonal_violations": [list(v) for v in self.diagonal_violations],
            "positivity_violations": [list(v) for v in self.positivity_violations],
            "symmetry_violations": [list(v) for v in self.symmetry_violations],
            "triangle_violations": [list(v) for v in self.triangle_violations],
        }


def _as_square_table(table) -> np.ndarray:
    try:
        arr = np.asarray(table, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StructuralInputError(f"distance table is not numeric: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructuralInputError(f"distance table must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise StructuralInputError("distance table is empty")
    if not np.all(np.isfinite(arr)):
        raise StructuralInputError("distance table contains non-finite entries")
    return arr


def validate_metric(table, tol: float = TOL) -> MetricValidationReport:
    """List every metric-axiom violation of a square distance table.

    Triangle violations are reported once per ordered endpoint pair ``i < j``
    with the intermediate ``k`` giving the largest excess.
    """
    d = _as_square_table(table)
    n = d.shape[0]

    diag = [(int(i), float(d[i, i])) for i in np.flatnonzero(np.abs(np.diag(d)) > tol)]

    asym = np.abs(d - d.T) > tol
    ii, jj = np.nonzero(np.triu(asym, 1))
    symmetry = [(int(i), int(j), float(d[i, j]), float(d[j, i])) for i, j in zip(ii, jj)]

    off = ~np.eye(n, dtype=bool)
    ii, jj = np.nonzero(np.triu(((d <= tol) | (d.T <= tol)) & off, 1))
    positivity = [(int(i), int(j)) for i, j in zip(ii, jj)]

    triangle = []
    if n >= 3:
        for i in range(n):
            # via[k, j] = d[i, k] + d[k, j]
            via = d[i][:, None] + d
            excess = d[i][None, :] - via
            excess[i, :] = -np.inf
            excess[:, i] = -np.inf
            np.fill_diagonal(excess, -np.inf)
            worst_k = np.argmax(excess, axis=0)
            worst = excess[worst_k, np.arange(n)]
            for j in np.flatnonzero(worst > tol):
                if j > i:
                    triangle.append((i, int(j), int(worst_k[j]), float(worst[j])))

    return MetricValidationReport(
        symmetry_violations=symmetry,
        triangle_violations=triangle,
        diagonal_violations=diag,
        positivity_violations=positivity,
    )


class FiniteMetricSpace:
    """``n`` points with a validated symmetric distance table.

    Build one with :meth:`from_matrix` or :meth:`from_points`. Coordinate-backed
    spaces larger than ``dense_limit`` compute rows lazily; asking for
    :attr:`dist` materializes the full table.
    """

    def __init__(
        self,
        dist: Optional[np.ndarray] = None,
        *,
        labels: Optional[Sequence[str]] = None,
        coords: Optional[np.ndarray] = None,
        metric: str = "euclidean",
        dense_limit: int = DEFAULT_DENSE_LIMIT,
    ):
        if dist is None and coords is None:
            raise StructuralInputError("need a distance table or coordinates")
        self._coords = None if coords is None else np.array(coords, dtype=float, copy=True)
        if self._coords is not None:
            self._coords.setflags(write=False)
        self._metric = metric
        if dist is not None:
            table = np.array(dist, dtype=float, copy=True)
            table.setflags(write=False)
            self.__dict__["dist"] = table
            self.n = table.shape[0]
        else:
            self.n = self._coords.shape[0]
            if self.n <= dense_limit:
                table = _pairwise(self._coords, metric)
                table.setflags(write=False)
                self.__dict__["dist"] = table
        self.labels = None if labels is None else tuple(str(s) for s in labels)
        if self.labels is not None and len(self.labels) != self.n:
            raise StructuralInputError(f"{len(self.labels)} labels for {self.n} points")

    @classmethod
    def from_matrix(cls, table, labels=None, tol: float = TOL, validate: bool = True):
        arr = _as_square_table(table)
        if validate:
            report = validate_metric(arr, tol)
            if not report.ok:
                raise MetricValidationError(report)
        return cls(arr, labels=labels)

    @classmethod
    def from_points(
        cls,
        coords,
        metric: str = "euclidean",
        labels=None,
        dense_limit: int = DEFAULT_DENSE_LIMIT,
        validate: bool = True,
    ):
        pts = np.asarray(coords, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise StructuralInputError(f"expected a 2-d array of points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise StructuralInputError("point coordinates contain non-finite entries")
        _reduce_diff(np.zeros((1, 1)), metric)  # reject unknown metric names early
        space = cls(coords=pts, metric=metric, labels=labels, dense_limit=dense_limit)
        if validate:
            # symmetry and the triangle inequality hold by construction; only
            # repeated points can break the axioms
            dupes = [
                (i, int(j))
                for i in range(space.n)
                for j in np.flatnonzero(space.row(i) <= TOL)
                if j > i
            ]
            if dupes:
                raise MetricValidationError(MetricValidationReport(positivity_violations=dupes))
        return space

    @cached_property
    def dist(self) -> np.ndarray:
        table = _pairwise(self._coords, self._metric)
        table.setflags(write=False)
        return table

    @property
    def coords(self) -> Optional[np.ndarray]:
        return self._coords

    @property
    def is_dense(self) -> bool:
        return "dist" in self.__dict__

    def row(self, i: int) -> np.ndarray:
        if self.is_dense:
            return self.dist[i]
        return _reduce_diff(self._coords - self._coords[i], self._metric)

    def d(self, i: int, j: int) -> float:
        if self.is_dense:
            return float(self.dist[i, j])
        return float(_reduce_diff(self._coords[i] - self._coords[j], self._metric))

    def check_index(self, i, name: str = "point") -> int:
        if isinstance(i, (bool, np.bool_)) or not isinstance(i, (int, np.integer)):
            raise DomainError(f"{name} index must be an integer, got {i!r}")
        if not 0 <= i < self.n:
            raise DomainError(f"{name} index {i} out of range for {self.n} points")
        return int(i)

    def subset(self, indices: Iterable[int]) -> "SubsetHandle":
        return SubsetHandle.of(self, indices)

    def all_points(self) -> "SubsetHandle":
        return SubsetHandle(tuple(range(self.n)), self.n)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        kind = "dense" if self.is_dense else "lazy"
        return f"FiniteMetricSpace(n={self.n}, {kind})"


@dataclass(frozen=True)
class SubsetHandle:
    """Strictly increasing point indices into a space with ``n`` points."""

    indices: tuple
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError("subset indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise DomainError(f"subset index out of range for {self.n} points")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, space: FiniteMetricSpace, indices: Iterable[int]) -> "SubsetHandle":
        idx = list(indices)
        for i in idx:
            space.check_index(i)
        if len(set(idx)) != len(idx):
            raise DomainError("subset contains duplicate indices")
        return cls(tuple(sorted(int(i) for i in idx)), space.n)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in set(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)


def _subset(space: FiniteMetricSpace, A) -> SubsetHandle:
    if isinstance(A, SubsetHandle):
        if A.n != space.n:
            raise StructuralInputError("subset belongs to a space of a different size")
        return A
    return SubsetHandle.of(space, A)


def dist_to_set(space: FiniteMetricSpace, x: int, A) -> float:
    """Distance from point ``x`` to the nonempty subset ``A``."""
    x = space.check_index(x)
    A = _subset(space, A)
    if not len(A):
        raise DomainError("distance to an empty set is undefined")
    return float(np.min(space.row(x)[A.as_array()]))


def closed_ball(space: FiniteMetricSpace, x: int, r: float, tol: float = TOL) -> SubsetHandle:
    x = space.check_index(x)
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    members = np.flatnonzero(space.row(x) <= r + tol)
    return SubsetHandle(tuple(int(i) for i in members), space.n)


def diameter(space: FiniteMetricSpace, B) -> float:
    B = _subset(space, B)
    if not len(B):
        raise DomainError("diameter of an empty set is undefined")
    idx = B.as_array()
    if space.is_dense:
        return float(np.max(space.dist[np.ix_(idx, idx)]))
    return float(max(np.max(space.row(i)[idx]) for i in idx))


def ball_inclusion_map(
    space_d: FiniteMetricSpace,
    space_rho: FiniteMetricSpace,
    x0: int,
    radii: Sequence[float],
    tol: float = TOL,
) -> list:
    """For each radius ``r`` the least ``R`` with ``B_rho[x0, r]`` inside ``B_d[x0, R]``.

    Returns a list of ``(r, R)`` pairs.
    """
    if space_d.n != space_rho.n:
        raise StructuralInputError(
            f"carrier sizes differ: {space_d.n} vs {space_rho.n}"
        )
    x0 = space_d.check_index(x0)
    radii = [float(r) for r in radii]
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be increasing")
    d_row = space_d.row(x0)
    rho_row = space_rho.row(x0)
    out = []
    for r in radii:
        if r < 0:
            raise DomainError(f"radius must be nonnegative, got {r}")
        ball = rho_row <= r + tol
        out.append((r, float(np.max(d_row[ball]))))
    return out

