"""Component labelings and the label-padded chain metric built from them.

Given a scale ``eps``, a representative point ``x_i`` in every eps-component
and a positive integer label ``f(i)`` per component, the metric ``rho`` is

* the chain distance ``d_eps(x, y)`` when ``x`` and ``y`` share a component;
* ``d_eps(x, x_i) + f(i) + d_eps(y, x_j) + f(j)`` when ``x`` lies in
  component ``i`` and ``y`` in component ``j != i``.

It agrees with ``d`` on every pair closer than ``eps`` in either metric, while
the labels decide how far apart whole components sit. That agreement needs
``eps <= 2``: a cross-component value is at least ``f(i) + f(j) >= 2``, so
above that scale two far-apart components can end up closer than ``eps``.
The metric axioms hold at every scale.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .chain_graph import ChainGraph, build_chain_graph
from .exceptions import DomainError, StructuralInputError
from .metric_core import TOL, FiniteMetricSpace, _subset


@dataclass(frozen=True)
class ComponentLabeling:
    graph: ChainGraph
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.graph.component_count:
            raise DomainError(
                f"need {self.graph.component_count} labels (one per component), got {len(self.values)}"
            )
        vals = []
        for v in self.values:
            if isinstance(v, bool) or not float(v).is_integer() or v < 1:
                raise DomainError(f"labels must be positive integers, got {v!r}")
            vals.append(int(v))
        object.__setattr__(self, "values", tuple(vals))

    def __getitem__(self, component: int) -> int:
        return self.values[component]


def build_labeling(graph: ChainGraph, values: Sequence[int]) -> ComponentLabeling:
    return ComponentLabeling(graph, tuple(values))


def as_point_function(labeling: ComponentLabeling) -> np.ndarray:
    """The labeling read off point by point; constant on every component."""
    return np.asarray(labeling.values, dtype=int)[labeling.graph.component_id]


def adversarial_labeling(graph: ChainGraph, B) -> ComponentLabeling:
    """Label the components met by ``B`` with 1, 2, 3, ... in order of first appearance.

    All other components get 1. The point function then takes as many values
    on ``B`` as ``B`` meets components, the most any labeling can achieve.
    """
    B = _subset(graph.space, B)
    if not len(B):
        raise DomainError("adversarial labeling needs a nonempty subset")
    values = [1] * graph.component_count
    seen = set()
    for x in B:
        c = int(graph.component_id[x])
        if c not in seen:
            seen.add(c)
            values[c] = len(seen)
    return ComponentLabeling(graph, tuple(values))


class RhoMetric:
    """Label-padded chain metric on a space at a fixed scale.

    Construction runs one Dijkstra pass per component (from its representative)
    so that cross-component values cost O(1). Within-component values use the
    graph's all-pairs chain distances, computed on first use.
    """

    def __init__(self, graph: ChainGraph, labeling: ComponentLabeling, representatives: Optional[Sequence[int]] = None):
        if labeling.graph is not graph:
            if labeling.graph.component_count != graph.component_count or not np.array_equal(
                labeling.graph.component_id, graph.component_id
            ):
                raise StructuralInputError("labeling was built for a different component structure")
        self.graph = graph
        self.labeling = labeling
        if representatives is None:
            reps = graph.representatives
        else:
            reps = tuple(int(r) for r in representatives)
            if len(reps) != graph.component_count:
                raise DomainError(
                    f"need one representative per component ({graph.component_count}), got {len(reps)}"
                )
            for c, r in enumerate(reps):
                graph.space.check_index(r, "representative")
                if graph.component_id[r] != c:
                    raise DomainError(
                        f"representative {r} lies in component {graph.component_id[r]}, not {c}"
                    )
        self.representatives = reps

        to_rep = np.empty(graph.n)
        for c, r in enumerate(reps):
            dist = graph.chain_distances_from(r)
            members = graph.components[c]
            to_rep[members] = dist[members]
        to_rep.setflags(write=False)
        self.to_rep = to_rep
        self._labels = as_point_function(labeling).astype(float)

    @property
    def space(self) -> FiniteMetricSpace:
        return self.graph.space

    @property
    def eps(self) -> float:
        return self.graph.eps

    def __call__(self, x: int, y: int) -> float:
        return rho_distance(self, x, y)

    def row(self, x: int) -> np.ndarray:
        """Values ``rho(x, y)`` for every ``y``."""
        x = self.space.check_index(x)
        cid = self.graph.component_id
        padded = self.to_rep + self._labels
        out = padded + padded[x]
        same = cid == cid[x]
        if "chain_distance_matrix" in self.graph.__dict__:
            out[same] = self.graph.chain_distance_matrix[x, same]
        else:
            out[same] = self.graph.chain_distances_from(x)[same]
        return out

    def matrix(self) -> np.ndarray:
        """Full table of values."""
        padded = self.to_rep + self._labels
        mat = padded[:, None] + padded[None, :]
        same = self.graph.component_id[:, None] == self.graph.component_id[None, :]
        mat[same] = self.graph.chain_distance_matrix[same]
        return mat

    def as_space(self, validate: bool = True) -> FiniteMetricSpace:
        return FiniteMetricSpace.from_matrix(self.matrix(), labels=self.space.labels, validate=validate)

    def __repr__(self) -> str:
        return f"RhoMetric(n={self.graph.n}, eps={self.eps:g}, components={self.graph.component_count})"


def build_rho(
    space: FiniteMetricSpace,
    eps: Union[float, ChainGraph],
    labeling: ComponentLabeling,
    representatives: Optional[Sequence[int]] = None,
) -> RhoMetric:
    """Build the padded metric; ``eps`` may also be a ready :class:`ChainGraph`."""
    if isinstance(eps, ChainGraph):
        graph = eps
        if graph.space is not space:
            raise StructuralInputError("chain graph was built on a different space")
    elif labeling.graph.space is space and labeling.graph.eps == float(eps):
        graph = labeling.graph
    else:
        graph = build_chain_graph(space, eps)
    return RhoMetric(graph, labeling, representatives)


def rho_distance(rho: RhoMetric, x: int, y: int) -> float:
    space = rho.space
    x = space.check_index(x)
    y = space.check_index(y)
    if x == y:
        return 0.0
    cid = rho.graph.component_id
    if cid[x] == cid[y]:
        if "chain_distance_matrix" in rho.graph.__dict__:
            return float(rho.graph.chain_distance_matrix[x, y])
        return float(rho.graph.chain_distances_from(x)[y])
    return float(rho.to_rep[x] + rho._labels[x] + rho.to_rep[y] + rho._labels[y])


def _distance_table(space: FiniteMetricSpace, metric2) -> np.ndarray:
    if isinstance(metric2, RhoMetric):
        if metric2.space.n != space.n:
            raise StructuralInputError("metrics live on carriers of different size")
        return metric2.matrix()
    if isinstance(metric2, FiniteMetricSpace):
        if metric2.n != space.n:
            raise StructuralInputError("metrics live on carriers of different size")
        return np.asarray(metric2.dist)
    if callable(metric2):
        return np.array([[metric2(i, j) for j in range(space.n)] for i in range(space.n)], dtype=float)
    table = np.asarray(metric2, dtype=float)
    if table.shape != (space.n, space.n):
        raise StructuralInputError(f"expected a {space.n}x{space.n} table, got {table.shape}")
    return table


def check_locally_identical(space_d: FiniteMetricSpace, metric2, eps: float, tol: float = TOL) -> list:
    """Pairs ``(x, y, d, other)`` where the two metrics disagree below scale ``eps``.

    Checks both directions: ``d < eps`` and ``other < eps`` must each force
    ``other == d`` within ``tol``. An empty list means the metrics are locally
    identical at this scale.
    """
    d = np.asarray(space_d.dist)
    other = _distance_table(space_d, metric2)
    close = (d < eps) | (other < eps)
    bad = close & (np.abs(other - d) > tol)
    ii, jj = np.nonzero(np.triu(bad | bad.T, 1))
    return [(int(i), int(j), float(d[i, j]), float(other[i, j])) for i, j in zip(ii, jj)]


@dataclass(frozen=True)
class LsWitness:
    K: float
    delta: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _point_values(space: FiniteMetricSpace, f) -> np.ndarray:
    if callable(f):
        vals = np.array([f(i) for i in range(space.n)], dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
    if vals.shape != (space.n,):
        raise StructuralInputError(f"expected {space.n} function values, got shape {vals.shape}")
    return vals


def check_lipschitz_small(space: FiniteMetricSpace, f, K: float, delta: float, tol: float = TOL) -> LsWitness:
    """Every pair closer than ``delta`` on which ``f`` stretches by more than ``K``."""
    if K < 0:
        raise DomainError(f"K must be nonnegative, got {K}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    vals = _point_values(space, f)
    d = np.asarray(space.dist)
    jump = np.abs(vals[:, None] - vals[None, :])
    bad = (d < delta) & (jump > K * d + tol)
    ii, jj = np.nonzero(np.triu(bad, 1))
    violations = [(int(i), int(j), float(d[i, j]), float(jump[i, j])) for i, j in zip(ii, jj)]
    return LsWitness(float(K), float(delta), violations)


__all__ = [
    "ComponentLabeling",
    "LsWitness",
    "RhoMetric",
    "adversarial_labeling",
    "as_point_function",
    "build_labeling",
    "build_rho",
    "check_lipschitz_small",
    "check_locally_identical",
    "rho_distance",
]
