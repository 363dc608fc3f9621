"""Epsilon-chains on a finite metric space.

Two points are *eps-chained* when a finite sequence of points joins them with
every consecutive step strictly shorter than ``eps``. The classes of that
relation are the connected components of the threshold graph
``{(x, y) : d(x, y) < eps}``; everything here is computed on that graph.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DifferentComponentsError, DomainError
from .metric_core import TOL, FiniteMetricSpace, SubsetHandle

#: Step count meaning "any finite number of steps" (the whole component).
INF = math.inf

Steps = Union[int, float]


def parse_steps(m) -> Steps:
    """Normalize a step count: a positive integer, or ``INF`` (also ``"inf"``)."""
    if isinstance(m, str):
        token = m.strip().lower()
        if token in ("inf", "infinity", "∞"):
            return INF
        try:
            m = int(token)
        except ValueError:
            raise DomainError(f"step count must be a positive integer or 'inf', got {m!r}")
    if isinstance(m, float) and math.isinf(m) and m > 0:
        return INF
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        if isinstance(m, float) and m.is_integer():
            m = int(m)
        else:
            raise DomainError(f"step count must be a positive integer or inf, got {m!r}")
    if m < 1:
        raise DomainError(f"step count must be >= 1, got {m}")
    return int(m)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True


@dataclass(frozen=True)
class Chain:
    """A sequence ``u_0, ..., u_m`` certified at scale ``eps``."""

    points: tuple
    eps: float

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    def step_sum(self, space: FiniteMetricSpace) -> float:
        return float(sum(space.d(a, b) for a, b in zip(self.points, self.points[1:])))

    def is_valid(self, space: FiniteMetricSpace) -> bool:
        return all(space.d(a, b) < self.eps for a, b in zip(self.points, self.points[1:]))

    def is_irreducible(self, space: FiniteMetricSpace) -> bool:
        p = self.points
        return all(
            space.d(p[k - 1], p[k]) + space.d(p[k], p[k + 1]) >= self.eps
            for k in range(1, len(p) - 1)
        )


@dataclass(frozen=True)
class ChainBall:
    center: int
    m: Steps
    members: SubsetHandle
    hop: tuple  # hop distance of each member, aligned with members.indices

    def __contains__(self, y) -> bool:
        return y in self.members


class ChainGraph:
    """Threshold graph of a space at scale ``eps`` with its chainable components.

    Adjacency uses the strict inequality ``d(x, y) < eps``. Components are
    numbered in order of their smallest point, which is also the component's
    representative.
    """

    def __init__(self, space: FiniteMetricSpace, eps: float):
        if not eps > 0 or not math.isfinite(eps):
            raise DomainError(f"eps must be a positive finite real, got {eps}")
        self.space = space
        self.eps = float(eps)
        n = space.n

        adjacency = []
        uf = UnionFind(n)
        for i in range(n):
            row = space.row(i)
            nbrs = np.flatnonzero(row < self.eps)
            nbrs = nbrs[nbrs != i]
            nbrs.setflags(write=False)
            adjacency.append(nbrs)
            for j in nbrs[nbrs > i]:
                uf.union(i, int(j))
        self.adjacency = tuple(adjacency)

        roots = [uf.find(i) for i in range(n)]
        label_of_root = {}
        component_id = np.empty(n, dtype=int)
        representatives = []
        for i, r in enumerate(roots):
            if r not in label_of_root:
                label_of_root[r] = len(representatives)
                representatives.append(i)
            component_id[i] = label_of_root[r]
        component_id.setflags(write=False)
        self.component_id = component_id
        self.representatives = tuple(representatives)
        self.component_count = len(representatives)

    @cached_property
    def components(self) -> tuple:
        """Member arrays, one per component, in component order."""
        order = np.argsort(self.component_id, kind="stable")
        bounds = np.searchsorted(self.component_id[order], np.arange(self.component_count + 1))
        return tuple(order[bounds[c] : bounds[c + 1]] for c in range(self.component_count))

    @property
    def n(self) -> int:
        return self.space.n

    def component_sizes(self) -> list:
        return [len(c) for c in self.components]

    def same_component(self, x: int, y: int) -> bool:
        return self.component_id[x] == self.component_id[y]

    def hops_from(self, x: int) -> np.ndarray:
        """Breadth-first hop counts from ``x``; ``-1`` marks other components."""
        x = self.space.check_index(x)
        hops = np.full(self.n, -1, dtype=int)
        hops[x] = 0
        frontier = [x]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for u in frontier:
                for v in self.adjacency[u]:
                    if hops[v] < 0:
                        hops[v] = depth
                        nxt.append(int(v))
            frontier = nxt
        return hops

    def chain_distances_from(self, x: int, return_predecessors: bool = False):
        """Dijkstra from ``x`` on the threshold graph weighted by ``d``."""
        x = self.space.check_index(x)
        dist = np.full(self.n, np.inf)
        pred = np.full(self.n, -1, dtype=int)
        dist[x] = 0.0
        heap = [(0.0, x)]
        done = np.zeros(self.n, dtype=bool)
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            nbrs = self.adjacency[u]
            if not len(nbrs):
                continue
            weights = self.space.row(u)[nbrs]
            for v, w in zip(nbrs, weights):
                alt = du + w
                if alt < dist[v]:
                    dist[v] = alt
                    pred[v] = u
                    heapq.heappush(heap, (alt, int(v)))
        if return_predecessors:
            return dist, pred
        return dist

    @cached_property
    def hop_matrix(self) -> np.ndarray:
        mat = np.vstack([self.hops_from(i) for i in range(self.n)])
        mat.setflags(write=False)
        return mat

    @cached_property
    def chain_distance_matrix(self) -> np.ndarray:
        """All-pairs chain distances; ``inf`` across components."""
        mat = np.vstack([self.chain_distances_from(i) for i in range(self.n)])
        # Dijkstra from both ends may round differently; keep the table symmetric
        mat = np.minimum(mat, mat.T)
        mat.setflags(write=False)
        return mat

    def __repr__(self) -> str:
        return f"ChainGraph(n={self.n}, eps={self.eps:g}, components={self.component_count})"


def build_chain_graph(space: FiniteMetricSpace, eps: float) -> ChainGraph:
    return ChainGraph(space, eps)


def chain_ball(graph: ChainGraph, x: int, m) -> ChainBall:
    """Points reachable from ``x`` by an eps-chain of at most ``m`` steps.

    ``m = INF`` gives the whole component of ``x``.
    """
    m = parse_steps(m)
    hops = graph.hops_from(x)
    inside = hops >= 0
    if not math.isinf(m):
        inside &= hops <= m
    members = np.flatnonzero(inside)
    return ChainBall(
        center=int(x),
        m=m,
        members=SubsetHandle(tuple(int(i) for i in members), graph.n),
        hop=tuple(int(h) for h in hops[members]),
    )


def hop_distance(graph: ChainGraph, x: int, y: int) -> Optional[int]:
    """Fewest steps of an eps-chain from ``x`` to ``y``; ``None`` across components."""
    y = graph.space.check_index(y)
    h = int(graph.hops_from(x)[y])
    return None if h < 0 else h


def chain_distance(graph: ChainGraph, x: int, y: int) -> Optional[float]:
    """Least step-sum over eps-chains from ``x`` to ``y``; ``None`` across components."""
    y = graph.space.check_index(y)
    x = graph.space.check_index(x)
    if not graph.same_component(x, y):
        return None
    if "chain_distance_matrix" in graph.__dict__:
        return float(graph.chain_distance_matrix[x, y])
    return float(graph.chain_distances_from(x)[y])


def shortest_chain(graph: ChainGraph, x: int, y: int) -> Chain:
    x = graph.space.check_index(x)
    y = graph.space.check_index(y)
    if not graph.same_component(x, y):
        raise DifferentComponentsError(
            f"points {x} and {y} are not {graph.eps:g}-chained"
        )
    _, pred = graph.chain_distances_from(x, return_predecessors=True)
    path = [y]
    while path[-1] != x:
        path.append(int(pred[path[-1]]))
    return Chain(tuple(reversed(path)), graph.eps)


def reduce_chain(space: FiniteMetricSpace, eps: float, chain: Union[Chain, Sequence[int]]) -> Chain:
    """Drop interior points until every two consecutive steps sum to at least ``eps``.

    An interior point ``u_k`` with ``d(u_{k-1}, u_k) + d(u_k, u_{k+1}) < eps``
    can go: the shortcut ``d(u_{k-1}, u_{k+1})`` is then below ``eps`` too, and
    no longer than the two steps it replaces.
    """
    points = list(chain.points if isinstance(chain, Chain) else chain)
    if not points:
        raise DomainError("empty chain")
    for p in points:
        space.check_index(p)
    for a, b in zip(points, points[1:]):
        if not space.d(a, b) < eps:
            raise DomainError(f"step ({a}, {b}) has length {space.d(a, b):g} >= eps={eps:g}")
    k = 1
    while k < len(points) - 1:
        if space.d(points[k - 1], points[k]) + space.d(points[k], points[k + 1]) < eps:
            del points[k]
            k = max(1, k - 1)
        else:
            k += 1
    return Chain(tuple(points), float(eps))


def hop_bound(chain_dist: float, eps: float) -> float:
    """Most steps an irreducible chain of step-sum ``chain_dist`` can take."""
    return 2.0 * chain_dist / eps + 1.0


__all__ = [
    "INF",
    "TOL",
    "Chain",
    "ChainBall",
    "ChainGraph",
    "UnionFind",
    "build_chain_graph",
    "chain_ball",
    "chain_distance",
    "hop_bound",
    "hop_distance",
    "parse_steps",
    "reduce_chain",
    "shortest_chain",
]
