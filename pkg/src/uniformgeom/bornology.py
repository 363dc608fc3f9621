"""Covers by balls and chain-balls, scale profiles and the boundedness report.

On a finite space every subset is bounded in every sense, so the interesting
quantities are the *sizes* of the covers at a given scale:

* net size (``m = 1``): fewest open ``eps``-balls covering ``B``;
* chain size at depth ``m``: fewest chain-balls ``B^m(c, eps)`` covering ``B``;
* components met (``m = inf``): how many eps-components ``B`` touches.

Centers range over the whole space, not just ``B``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chain_graph import INF, ChainGraph, build_chain_graph, chain_ball, hop_bound, parse_steps
from .exceptions import CapacityError, DomainError, UniformGeomError
from .metric_builders import RhoMetric, check_lipschitz_small, LsWitness, _point_values
from .metric_core import TOL, FiniteMetricSpace, SubsetHandle, _subset, diameter

DEFAULT_EXACT_LIMIT = 14


@dataclass(frozen=True)
class CoverResult:
    centers: tuple
    m: object  # int or INF
    eps: float
    covered: SubsetHandle
    method: str

    @property
    def size(self) -> int:
        return len(self.centers)

    def verify(self, graph: ChainGraph) -> bool:
        """Re-check that every covered point is within ``m`` hops of some center."""
        if not self.covered.indices:
            return True
        hops = graph.hop_matrix[np.asarray(self.centers)][:, self.covered.as_array()]
        reach = hops >= 0
        if not math.isinf(self.m):
            reach &= hops <= self.m
        return bool(np.all(reach.any(axis=0)))


def _graph_for(space: FiniteMetricSpace, eps: float, graph: Optional[ChainGraph]) -> ChainGraph:
    if graph is None:
        return build_chain_graph(space, eps)
    if graph.space is not space or graph.eps != float(eps):
        raise DomainError("supplied chain graph does not match (space, eps)")
    return graph


def _coverage_masks(graph: ChainGraph, B: SubsetHandle, m) -> list:
    """Bitmask over positions of ``B`` covered by each candidate center."""
    b = B.as_array()
    if m == 1:
        reach = np.vstack([graph.space.row(c)[b] < graph.eps for c in range(graph.n)])
    elif math.isinf(m):
        reach = graph.component_id[:, None] == graph.component_id[b][None, :]
    else:
        hops = graph.hop_matrix[:, b]
        reach = (hops >= 0) & (hops <= m)
    weights = [1 << k for k in range(len(b))]
    return [sum(w for w, hit in zip(weights, row) if hit) for row in reach]


def _greedy(masks: list, full: int) -> list:
    uncovered = full
    chosen = []
    while uncovered:
        best, gain = -1, 0
        for c, mask in enumerate(masks):
            g = (mask & uncovered).bit_count()
            if g > gain:
                best, gain = c, g
        if best < 0:
            raise UniformGeomError("cover impossible: some point has no candidate center")
        chosen.append(best)
        uncovered &= ~masks[best]
    return chosen


def _reduced_candidates(masks: list) -> list:
    """Centers whose coverage is nonempty, distinct and not strictly dominated."""
    first = {}
    for c, mask in enumerate(masks):
        if mask and mask not in first:
            first[mask] = c
    distinct = sorted(first.items(), key=lambda kv: (-kv[0].bit_count(), kv[1]))
    kept = []
    for mask, c in distinct:
        if not any(mask | other == other for other, _ in kept):
            kept.append((mask, c))
    return sorted(c for _, c in kept)


def _exact(masks: list, full: int, exact_limit: int) -> list:
    candidates = _reduced_candidates(masks)
    if len(candidates) > exact_limit:
        raise CapacityError(
            f"exact cover needs {len(candidates)} candidate centers after reduction; limit is {exact_limit}"
        )
    upper = sorted(_greedy(masks, full))
    for k in range(1, len(upper)):
        for combo in itertools.combinations(candidates, k):
            acc = 0
            for c in combo:
                acc |= masks[c]
            if acc == full:
                return list(combo)
    return upper


def _cover(space, B, eps, m, method, exact_limit, graph) -> CoverResult:
    B = _subset(space, B)
    if not len(B):
        raise DomainError("cannot cover an empty subset")
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    m = parse_steps(m)
    graph = _graph_for(space, eps, graph)
    masks = _coverage_masks(graph, B, m)
    full = (1 << len(B)) - 1
    if method == "greedy":
        centers = _greedy(masks, full)
    elif method == "exact":
        centers = _exact(masks, full, exact_limit)
    else:
        raise DomainError(f"method must be 'greedy' or 'exact', got {method!r}")
    return CoverResult(tuple(sorted(int(c) for c in centers)), m, float(eps), B, method)


def net_cover(
    space: FiniteMetricSpace,
    B,
    eps: float,
    method: str = "greedy",
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    graph: Optional[ChainGraph] = None,
) -> CoverResult:
    """Cover ``B`` by open ``eps``-balls centered anywhere in the space.

    ``greedy`` repeatedly takes the center covering the most uncovered points
    (smallest index on ties). ``exact`` searches for a minimum cover; the
    ``exact_limit`` bounds the number of candidate centers left after dropping
    duplicates and dominated ones.
    """
    return _cover(space, B, eps, 1, method, exact_limit, graph)


def chain_cover(
    space: FiniteMetricSpace,
    B,
    eps: float,
    m,
    method: str = "greedy",
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    graph: Optional[ChainGraph] = None,
) -> CoverResult:
    """Cover ``B`` by chain-balls ``B^m(c, eps)``; ``m = INF`` covers by components."""
    return _cover(space, B, eps, m, method, exact_limit, graph)


def components_met(graph: ChainGraph, B) -> int:
    B = _subset(graph.space, B)
    if not len(B):
        raise DomainError("components_met needs a nonempty subset")
    return len(set(graph.component_id[B.as_array()].tolist()))


# -- the two directions of the rho-boundedness lemma --------------------------


@dataclass(frozen=True)
class ForwardBound:
    bound: float
    K: int
    M: int
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def rho_bounded_forward_bound(rho: RhoMetric, F: Sequence[int], M: int, j: int, tol: float = TOL) -> ForwardBound:
    """Check ``rho(x, x_j) <= M*eps + 2K`` on the union of ``B^M(x_i, eps)``, ``i`` in ``F``.

    ``K`` is the largest label over ``F`` and ``x_i`` the representatives the
    metric was built with.
    """
    F = sorted({int(i) for i in F})
    if not F:
        raise DomainError("F must name at least one component")
    for i in F:
        if not 0 <= i < rho.graph.component_count:
            raise DomainError(f"component {i} does not exist")
    if j not in F:
        raise DomainError(f"component {j} is not in F")
    M = parse_steps(M)
    if math.isinf(M):
        raise DomainError("M must be finite")
    K = max(rho.labeling[i] for i in F)
    bound = M * rho.eps + 2 * K
    xj = rho.representatives[j]

    region = np.zeros(rho.graph.n, dtype=bool)
    for i in F:
        hops = rho.graph.hops_from(rho.representatives[i])
        region |= (hops >= 0) & (hops <= M)
    points = np.flatnonzero(region)
    to_j = rho.row(xj)
    violations = [(int(x), float(to_j[x])) for x in points if to_j[x] > bound + tol]
    return ForwardBound(float(bound), int(K), int(M), len(points), violations)


def rho_bounded_reverse_cover(rho: RhoMetric, B, R: float) -> CoverResult:
    """Certify a ``rho``-ball-bounded ``B`` by finitely many chain-balls of bounded depth.

    With ``i0`` the component of the first point of ``B``, every ``x`` in ``B``
    must satisfy ``rho(x, x_i0) < R``. The certificate uses the components met
    by ``B`` as centers (their representatives) and depth
    ``M = ceil(2 (R + K + f(i0)) / eps) + 1`` where ``K`` is the largest label
    among those components.
    """
    B = _subset(rho.space, B)
    if not len(B):
        raise DomainError("cannot certify an empty subset")
    graph = rho.graph
    i0 = int(graph.component_id[B.indices[0]])
    x_i0 = rho.representatives[i0]
    from_rep = rho.row(x_i0)
    for x in B:
        if not from_rep[x] < R:
            raise DomainError(
                f"point {x} has rho-distance {from_rep[x]:g} >= R={R:g} from representative {x_i0}"
            )
    F = sorted(set(graph.component_id[B.as_array()].tolist()))
    K = max(rho.labeling[i] for i in F)
    M = math.ceil(2.0 * (R + K + rho.labeling[i0]) / rho.eps) + 1
    centers = tuple(rho.representatives[i] for i in F)
    result = CoverResult(centers, int(M), rho.eps, B, "certificate")
    if not result.verify(graph):
        raise UniformGeomError("reverse-cover certificate failed to verify")
    return result


# -- profiles and the report --------------------------------------------------


@dataclass(frozen=True)
class ProfileEntry:
    m: object
    size: int
    method: str


@dataclass(frozen=True)
class ScaleRow:
    eps: float
    entries: tuple
    components_met: int

    def size_at(self, m) -> int:
        m = parse_steps(m)
        for e in self.entries:
            if e.m == m:
                return e.size
        raise KeyError(m)


@dataclass(frozen=True)
class ScaleProfile:
    subset: SubsetHandle
    grid: tuple
    anomalies: tuple = ()  # (eps, m_lo, m_hi, size_lo, size_hi) where size grew with m


def _normalize_m_grid(m_grid) -> list:
    ms = [parse_steps(m) for m in m_grid]
    if 1 not in ms:
        ms.append(1)
    if not any(math.isinf(m) for m in ms):
        ms.append(INF)
    return sorted(set(ms))


def scale_profile(
    space: FiniteMetricSpace,
    B,
    eps_grid: Sequence[float],
    m_grid: Sequence = (1, INF),
    method: str = "greedy",
    exact_limit: int = DEFAULT_EXACT_LIMIT,
) -> ScaleProfile:
    """Cover sizes for every ``(eps, m)`` cell plus the component count per scale.

    ``m = 1`` and ``m = INF`` are always included. With greedy covers a size
    may fail to shrink as ``m`` grows; such cells are recorded as anomalies
    rather than corrected.
    """
    B = _subset(space, B)
    if not len(B):
        raise DomainError("cannot profile an empty subset")
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid:
        raise DomainError("eps grid is empty")
    if any(b <= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise DomainError("eps grid must be strictly ascending")
    ms = _normalize_m_grid(m_grid)
    rows = []
    anomalies = []
    for eps in eps_grid:
        graph = build_chain_graph(space, eps)
        entries = []
        for m in ms:
            cover = chain_cover(space, B, eps, m, method=method, exact_limit=exact_limit, graph=graph)
            entries.append(ProfileEntry(m, cover.size, method))
        for lo, hi in zip(entries, entries[1:]):
            if hi.size > lo.size:
                anomalies.append((eps, lo.m, hi.m, lo.size, hi.size))
        rows.append(ScaleRow(eps, tuple(entries), components_met(graph, B)))
    return ScaleProfile(B, tuple(rows), tuple(anomalies))


@dataclass(frozen=True)
class DivergenceFlag:
    """At ``eps``, depth-``m`` chain-balls need fewer centers than plain balls."""

    subset: int
    eps: float
    m: object
    net_size: int
    chain_size: int


@dataclass(frozen=True)
class SubsetReport:
    subset: SubsetHandle
    diameter: float
    profile: ScaleProfile


@dataclass
class BornologyReport:
    eps_grid: list
    m_grid: list
    subsets: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    space: object = "external"
    verification: Optional[list] = None


def _summarize(k: int, rep: SubsetReport, flags: list) -> str:
    rows = rep.profile.grid
    nets = [r.size_at(1) for r in rows]
    comps = [r.components_met for r in rows]
    finite_ms = [e.m for e in rows[0].entries if not math.isinf(e.m) and e.m > 1]
    parts = [
        f"subset {k} ({len(rep.subset)} points): bounded, diameter {rep.diameter:.6g}",
        f"net sizes {min(nets)}..{max(nets)} over the grid",
    ]
    if finite_ms:
        deepest = max(finite_ms)
        chains = [r.size_at(deepest) for r in rows]
        parts.append(f"chain-{deepest} sizes {min(chains)}..{max(chains)}")
    parts.append(f"components met {min(comps)}..{max(comps)}")
    mine = [f for f in flags if f.subset == k]
    if mine:
        where = sorted({f"{f.eps:g}" for f in mine}, key=float)
        parts.append("chain covers beat nets at eps " + ", ".join(where))
    else:
        parts.append("no net/chain divergence on this grid")
    return "; ".join(parts)


def bornology_report(
    space: FiniteMetricSpace,
    subsets: Sequence,
    eps_grid: Sequence[float],
    m_grid: Sequence = (1, INF),
    method: str = "greedy",
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    space_descriptor=None,
) -> BornologyReport:
    """Tabulate scale profiles for each subset and flag net/chain divergences."""
    subsets = [_subset(space, S) for S in subsets]
    ms = _normalize_m_grid(m_grid)
    report = BornologyReport(
        eps_grid=[float(e) for e in eps_grid],
        m_grid=ms,
        space="external" if space_descriptor is None else space_descriptor,
    )
    for k, S in enumerate(subsets):
        profile = scale_profile(space, S, eps_grid, ms, method=method, exact_limit=exact_limit)
        report.subsets.append(SubsetReport(S, diameter(space, S), profile))
        for row in profile.grid:
            net = row.size_at(1)
            for e in row.entries:
                if not math.isinf(e.m) and e.m > 1 and e.size < net:
                    report.flags.append(DivergenceFlag(k, row.eps, e.m, net, e.size))
    report.summary = [_summarize(k, rep, report.flags) for k, rep in enumerate(report.subsets)]
    return report


# -- sequence diagnostic and oscillation --------------------------------------


@dataclass(frozen=True)
class CauchyWitness:
    m: int
    tail_start: int
    center: int


def bourbaki_cauchy_prefix(
    space: FiniteMetricSpace,
    seq: Sequence[int],
    eps: float,
    min_tail: int = 5,
    graph: Optional[ChainGraph] = None,
) -> Optional[CauchyWitness]:
    """Smallest chain-ball ``B^m(center, eps)`` holding a tail of ``seq``.

    Candidates are ordered by ``m``, then ``tail_start``, then the deepest hop
    actually used, then center index; only tails of length at least
    ``min_tail`` count. Returns ``None`` when every admissible tail meets more
    than one eps-component.
    """
    seq = [space.check_index(s) for s in seq]
    if min_tail < 1:
        raise DomainError(f"min_tail must be positive, got {min_tail}")
    if min_tail > len(seq):
        raise DomainError(f"min_tail={min_tail} exceeds sequence length {len(seq)}")
    graph = _graph_for(space, eps, graph)
    hops = graph.hop_matrix[:, seq].astype(float)
    hops[hops < 0] = np.inf
    # depth[c, t] = deepest hop from c needed to hold seq[t:]
    depth = np.maximum.accumulate(hops[:, ::-1], axis=1)[:, ::-1]
    last = len(seq) - min_tail
    best = None
    for t in range(last + 1):
        for c in range(graph.n):
            reach = depth[c, t]
            if math.isinf(reach):
                continue
            key = (max(1, int(reach)), t, int(reach), c)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return CauchyWitness(m=best[0], tail_start=best[1], center=best[3])


@dataclass(frozen=True)
class OscillationResult:
    oscillation: float
    bound: float
    ok: bool


def oscillation_check(
    space: FiniteMetricSpace,
    f,
    x: int,
    m: int,
    K: float,
    eps: float,
    graph: Optional[ChainGraph] = None,
    witness: Optional[LsWitness] = None,
    tol: float = TOL,
) -> OscillationResult:
    """Largest ``|f(y) - f(x)|`` over ``B^m(x, eps)`` against the bound ``K*m*eps``.

    ``f`` must be ``K``-Lipschitz on pairs closer than ``eps``; pass a clean
    ``witness`` from :func:`check_lipschitz_small` to skip re-checking.
    """
    vals = _point_values(space, f)
    m = parse_steps(m)
    if math.isinf(m):
        raise DomainError("oscillation bound needs a finite step count")
    if witness is None or witness.K != K or witness.delta != eps:
        witness = check_lipschitz_small(space, vals, K, eps, tol=tol)
    if not witness.ok:
        raise DomainError(
            f"f is not certified {K:g}-Lipschitz below scale {eps:g}: "
            f"{len(witness.violations)} violating pair(s)"
        )
    graph = _graph_for(space, eps, graph)
    ball = chain_ball(graph, x, m)
    osc = float(np.max(np.abs(vals[ball.members.as_array()] - vals[x])))
    bound = K * m * eps
    return OscillationResult(osc, float(bound), osc <= bound + tol)


__all__ = [
    "DEFAULT_EXACT_LIMIT",
    "BornologyReport",
    "CauchyWitness",
    "CoverResult",
    "DivergenceFlag",
    "ForwardBound",
    "OscillationResult",
    "ProfileEntry",
    "ScaleProfile",
    "ScaleRow",
    "SubsetReport",
    "bornology_report",
    "bourbaki_cauchy_prefix",
    "chain_cover",
    "components_met",
    "hop_bound",
    "net_cover",
    "oscillation_check",
    "rho_bounded_forward_bound",
    "rho_bounded_reverse_cover",
    "scale_profile",
]
