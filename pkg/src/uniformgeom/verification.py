"""Seeded property suites with brute-force oracles.

Each property draws random instances from a seeded generator, runs the
library routine and an independent check, and counts failures. The oracles
here deliberately avoid the library's own traversals: chain distances come
from simple-path enumeration or Floyd-Warshall, chain-balls from the literal
"union of eps-balls around the previous layer" definition.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .bornology import (
    chain_cover,
    components_met,
    oscillation_check,
    rho_bounded_forward_bound,
    rho_bounded_reverse_cover,
)
from .chain_graph import build_chain_graph, hop_bound
from .metric_builders import (
    adversarial_labeling,
    as_point_function,
    build_labeling,
    build_rho,
    check_lipschitz_small,
    check_locally_identical,
)
from .metric_core import TOL, FiniteMetricSpace

# default instance counts per property
SUITE1_INSTANCES = 200
ORACLE_INSTANCES = 100
COVER_INSTANCES = 50


# -- oracles ------------------------------------------------------------------


def enumerate_chain_distances(dist: np.ndarray, eps: float) -> np.ndarray:
    """Least step-sum over every simple eps-path, by exhaustive depth-first enumeration."""
    n = dist.shape[0]
    best = np.full((n, n), np.inf)
    nbrs = [[j for j in range(n) if j != i and dist[i, j] < eps] for i in range(n)]

    for src in range(n):
        row = best[src]
        on_path = [False] * n
        on_path[src] = True

        def walk(u, total):
            if total < row[u]:
                row[u] = total
            for v in nbrs[u]:
                if not on_path[v]:
                    on_path[v] = True
                    walk(v, total + dist[u, v])
                    on_path[v] = False

        walk(src, 0.0)
    return best


def floyd_warshall_chain_distances(dist: np.ndarray, eps: float) -> np.ndarray:
    w = np.where(dist < eps, dist, np.inf)
    np.fill_diagonal(w, 0.0)
    for k in range(w.shape[0]):
        w = np.minimum(w, w[:, k : k + 1] + w[k : k + 1, :])
    return w


def literal_chain_balls(dist: np.ndarray, eps: float, x: int, m_max: int) -> list:
    """``[B^1, ..., B^m_max]`` around ``x`` as boolean masks, straight from the definition."""
    near = dist < eps
    layers = []
    current = near[x].copy()
    layers.append(current.copy())
    for _ in range(1, m_max):
        nxt = near[current].any(axis=0)
        if np.array_equal(nxt, current):
            # fixed point: every later layer is the same set
            layers.extend([current] * (m_max - len(layers)))
            break
        current = nxt
        layers.append(current.copy())
    return layers


def literal_hops(dist: np.ndarray, eps: float) -> np.ndarray:
    """Hop counts as the first ``m`` whose literal chain-ball contains the target."""
    n = dist.shape[0]
    near = dist < eps
    hops = np.full((n, n), -1, dtype=int)
    for x in range(n):
        hops[x, x] = 0
        current = near[x].copy()
        m = 1
        while True:
            fresh = current & (hops[x] < 0)
            if not fresh.any():
                break
            hops[x, fresh] = m
            current = near[current].any(axis=0)
            m += 1
    return hops


def brute_min_cover(reach: np.ndarray) -> int:
    """Minimum number of rows of ``reach`` (centers x B) whose union covers every column."""
    n_centers, width = reach.shape
    masks = [sum(1 << k for k in range(width) if reach[c, k]) for c in range(n_centers)]
    full = (1 << width) - 1
    for size in range(1, n_centers + 1):
        for combo in _combinations(n_centers, size):
            acc = 0
            for c in combo:
                acc |= masks[c]
            if acc == full:
                return size
    raise ValueError("no cover exists")


def _combinations(n, k):
    import itertools

    return itertools.combinations(range(n), k)


# -- instances ----------------------------------------------------------------


@dataclass
class Instance:
    space: FiniteMetricSpace
    eps: float
    labels: list = field(default_factory=list)

    @property
    def n(self):
        return self.space.n


def random_space(rng: np.random.Generator, n_min: int, n_max: int) -> FiniteMetricSpace:
    """Uniform cloud or a few Gaussian blobs, in 1 to 3 dimensions."""
    n = int(rng.integers(n_min, n_max + 1))
    dim = int(rng.integers(1, 4))
    if rng.random() < 0.5:
        pts = rng.random((n, dim))
    else:
        k = int(rng.integers(2, 6))
        centers = rng.random((k, dim)) * 4
        pts = centers[rng.integers(0, k, size=n)] + rng.normal(scale=0.3, size=(n, dim))
    return FiniteMetricSpace.from_points(pts)


def random_eps(rng: np.random.Generator, space: FiniteMetricSpace) -> float:
    """Log-uniform scale between the smallest and largest positive distance, capped at 1.

    The padded metric only agrees with ``d`` below scale when ``eps`` stays
    under the smallest cross-component padding (2 with labels >= 1); scales
    ``1/n`` never exceed 1.
    """
    d = np.asarray(space.dist)
    if space.n < 2:
        return 1.0
    pos = d[np.triu_indices(space.n, 1)]
    lo, hi = float(pos.min()), min(float(pos.max()), 1.0)
    if hi <= lo:
        return min(lo * 1.5, 1.0)
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def suite1_instances(seed: int, count: int = SUITE1_INSTANCES, n_max: int = 60) -> Iterator[Instance]:
    rng = np.random.default_rng([seed, 1])
    for _ in range(count):
        space = random_space(rng, 2, n_max)
        eps = random_eps(rng, space)
        graph = build_chain_graph(space, eps)
        labels = rng.integers(1, 6, size=graph.component_count).tolist()
        yield Instance(space, eps, labels)


def small_instances(seed: int, stream: int, count: int, n_max: int, n_min: int = 2) -> Iterator[Instance]:
    rng = np.random.default_rng([seed, stream])
    for _ in range(count):
        space = random_space(rng, n_min, n_max)
        yield Instance(space, random_eps(rng, space))


# -- properties ---------------------------------------------------------------


@dataclass
class PropertyResult:
    property: str
    instances: int
    failures: int
    seconds: float
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"failures": self.failures, "instances": self.instances, "property": self.property}


def _run(name: str, body: Callable[[list], int]) -> PropertyResult:
    details: list = []
    start = time.perf_counter()
    instances = body(details)
    return PropertyResult(name, instances, len(details), time.perf_counter() - start, details)


def _rho_parts(inst: Instance):
    graph = build_chain_graph(inst.space, inst.eps)
    labeling = build_labeling(graph, inst.labels)
    rho = build_rho(inst.space, graph, labeling)
    return graph, labeling, rho


def prop_rho_triangle(seed: int, count: int = SUITE1_INSTANCES, tol: float = TOL) -> PropertyResult:
    """Padded chain metric: every triple satisfies the triangle inequality."""

    def body(details):
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            _, _, rho = _rho_parts(inst)
            R = rho.matrix()
            excess = R[:, None, :] - (R[:, :, None] + R[None, :, :])
            worst = float(excess.max())
            if worst > tol:
                details.append((k, "triangle", worst))
            if np.abs(R - R.T).max() > tol or np.abs(np.diag(R)).max() > tol:
                details.append((k, "symmetry/diagonal"))
            off = R + np.eye(inst.n)
            if off.min() <= tol:
                details.append((k, "positivity"))
        return k

    return _run("rho triangle inequality", body)


def prop_rho_formula(seed: int, count: int = SUITE1_INSTANCES, tol: float = TOL) -> PropertyResult:
    """Padded metric equals its two-case formula recomputed with Floyd-Warshall."""

    def body(details):
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph, labeling, rho = _rho_parts(inst)
            cd = floyd_warshall_chain_distances(np.asarray(inst.space.dist), inst.eps)
            comp = graph.component_id
            reps = rho.representatives
            f = np.asarray(inst.labels, dtype=float)
            R = rho.matrix()
            for x in range(inst.n):
                for y in range(inst.n):
                    i, j = comp[x], comp[y]
                    if i == j:
                        expect = cd[x, y]
                    else:
                        expect = cd[x, reps[i]] + f[i] + cd[y, reps[j]] + f[j]
                    if abs(R[x, y] - expect) > tol:
                        details.append((k, x, y, R[x, y], expect))
        return k

    return _run("rho two-case formula", body)


def prop_local_identity(seed: int, count: int = SUITE1_INSTANCES, tol: float = TOL) -> PropertyResult:
    """``d < eps`` or ``rho < eps`` forces ``rho == d``; also for a second choice of representatives."""

    def body(details):
        rng = np.random.default_rng([seed, 3])
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph, labeling, rho = _rho_parts(inst)
            d = np.asarray(inst.space.dist)
            R = rho.matrix()
            close = (d < inst.eps) | (R < inst.eps)
            bad = close & (np.abs(R - d) > tol)
            if bad.any():
                details.append((k, "rho", int(bad.sum())))
            if check_locally_identical(inst.space, rho, inst.eps, tol):
                details.append((k, "checker"))
            alt_reps = [int(rng.choice(c)) for c in graph.components]
            omega = build_rho(inst.space, graph, labeling, alt_reps).matrix()
            small = (R < inst.eps) | (omega < inst.eps)
            if (small & ((np.abs(R - omega) > tol) | (np.abs(R - d) > tol))).any():
                details.append((k, "representative choice"))
        return k

    return _run("uniform local identity", body)


def prop_chain_distance_oracle(seed: int, count: int = ORACLE_INSTANCES, tol: float = 1e-12) -> PropertyResult:
    """Dijkstra chain distances equal the simple-path enumeration minimum."""

    def body(details):
        k = 0
        for k, inst in enumerate(small_instances(seed, 2, count, n_max=9), start=1):
            graph = build_chain_graph(inst.space, inst.eps)
            ours = np.array(graph.chain_distance_matrix)
            oracle = enumerate_chain_distances(np.asarray(inst.space.dist), inst.eps)
            if not np.array_equal(np.isinf(ours), np.isinf(oracle)):
                details.append((k, "reachability"))
                continue
            fin = np.isfinite(ours)
            gap = float(np.max(np.abs(ours[fin] - oracle[fin])))
            if gap > tol:
                details.append((k, gap))
        return k

    return _run("chain distance = path enumeration", body)


def prop_chain_metric_axioms(seed: int, count: int = ORACLE_INSTANCES, tol: float = TOL) -> PropertyResult:
    """Chain distance is a metric on each component, dominates ``d``, equals it below eps."""

    def body(details):
        k = 0
        for k, inst in enumerate(small_instances(seed, 4, count, n_max=30), start=1):
            graph = build_chain_graph(inst.space, inst.eps)
            cd = np.array(graph.chain_distance_matrix)
            d = np.asarray(inst.space.dist)
            fin = np.isfinite(cd)
            if (cd[fin] < d[fin] - tol).any():
                details.append((k, "below d"))
            close = d < inst.eps
            if (np.abs(cd[close] - d[close]) > tol).any():
                details.append((k, "one-step"))
            if np.abs(np.where(fin, cd, 0) - np.where(fin, cd, 0).T).max() > tol:
                details.append((k, "symmetry"))
            same = graph.component_id[:, None] == graph.component_id[None, :]
            triple = same[:, :, None] & same[None, :, :]  # [x, k, y]
            with np.errstate(invalid="ignore"):
                excess = cd[:, None, :] - (cd[:, :, None] + cd[None, :, :])
            if (np.where(triple, excess, -np.inf) > tol).any():
                details.append((k, "triangle"))
            hops = literal_hops(d, inst.eps)
            if not np.array_equal(hops, graph.hop_matrix):
                details.append((k, "hop matrix"))
        return k

    return _run("chain metric axioms", body)


def prop_hop_bound(seed: int, count: int = SUITE1_INSTANCES, tol: float = TOL) -> PropertyResult:
    """Every connected pair has ``hops <= 2 * chain_distance / eps + 1``."""

    def body(details):
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph = build_chain_graph(inst.space, inst.eps)
            hops = graph.hop_matrix
            cd = graph.chain_distance_matrix
            conn = hops >= 0
            if (hops[conn] > hop_bound(cd[conn], inst.eps) + tol).any():
                details.append(k)
        return k

    return _run("irreducible-chain hop bound", body)


def prop_forward_bound(seed: int, count: int = SUITE1_INSTANCES) -> PropertyResult:
    """Finitely many chain-balls of depth M sit in one rho-ball of radius M*eps + 2K."""

    def body(details):
        rng = np.random.default_rng([seed, 5])
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph, labeling, rho = _rho_parts(inst)
            c = graph.component_count
            F = sorted(rng.choice(c, size=int(rng.integers(1, min(c, 6) + 1)), replace=False).tolist())
            M = int(rng.integers(1, 5))
            j = int(rng.choice(F))
            result = rho_bounded_forward_bound(rho, F, M, j)
            if result.violations:
                details.append((k, result.violations[:3]))
            # independent recheck from literal chain-balls and the formula
            d = np.asarray(inst.space.dist)
            K = max(inst.labels[i] for i in F)
            R = rho.matrix()
            region = np.zeros(inst.n, dtype=bool)
            for i in F:
                region |= literal_chain_balls(d, inst.eps, rho.representatives[i], M)[-1]
            if (R[region, rho.representatives[j]] > M * inst.eps + 2 * K + TOL).any():
                details.append((k, "literal recheck"))
        return k

    return _run("rho-boundedness lemma, forward", body)


def prop_reverse_cover(seed: int, count: int = ORACLE_INSTANCES) -> PropertyResult:
    """A subset inside a rho-ball is covered by boundedly deep chain-balls."""

    def body(details):
        rng = np.random.default_rng([seed, 6])
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph, labeling, rho = _rho_parts(inst)
            size = int(rng.integers(1, inst.n + 1))
            B = sorted(rng.choice(inst.n, size=size, replace=False).tolist())
            i0 = graph.component_id[B[0]]
            x_i0 = rho.representatives[i0]
            R = float(rho.row(x_i0)[B].max()) + float(rng.uniform(1e-6, 2.0))
            try:
                cover = rho_bounded_reverse_cover(rho, B, R)
            except Exception as exc:  # noqa: BLE001 - any failure counts
                details.append((k, repr(exc)))
                continue
            d = np.asarray(inst.space.dist)
            reach = np.zeros(inst.n, dtype=bool)
            for c in cover.centers:
                reach |= literal_chain_balls(d, inst.eps, c, cover.m)[-1]
            if not reach[B].all():
                details.append((k, "literal recheck"))
        return k

    return _run("rho-boundedness lemma, reverse", body)


def prop_label_images(seed: int, count: int = ORACLE_INSTANCES) -> PropertyResult:
    """No component labeling takes more values on B than the components B meets."""

    def body(details):
        rng = np.random.default_rng([seed, 7])
        k = 0
        for k, inst in enumerate(small_instances(seed, 7, count, n_max=60), start=1):
            graph = build_chain_graph(inst.space, inst.eps)
            size = int(rng.integers(1, inst.n + 1))
            B = sorted(rng.choice(inst.n, size=size, replace=False).tolist())
            met = components_met(graph, B)
            for _ in range(10):
                top = int(rng.integers(1, 2 * graph.component_count + 2))
                labels = rng.integers(1, top + 1, size=graph.component_count)
                g = as_point_function(build_labeling(graph, labels.tolist()))
                if len(set(g[B].tolist())) > met:
                    details.append((k, "random labeling"))
            g = as_point_function(adversarial_labeling(graph, B))
            if len(set(g[B].tolist())) != met:
                details.append((k, "adversarial"))
            if met != len({int(graph.component_id[b]) for b in B}):
                details.append((k, "components_met"))
        return k

    return _run("labeling images bounded by components met", body)


def prop_cover_chain(seed: int, count: int = COVER_INSTANCES) -> PropertyResult:
    """Exact sizes: net >= chain-2 >= chain-4 >= components met; greedy within 1 + ln|B|."""

    def body(details):
        rng = np.random.default_rng([seed, 8])
        k = 0
        for k, inst in enumerate(small_instances(seed, 8, count, n_max=14, n_min=3), start=1):
            graph = build_chain_graph(inst.space, inst.eps)
            size = int(rng.integers(1, inst.n + 1))
            B = sorted(rng.choice(inst.n, size=size, replace=False).tolist())
            exact = {}
            for m in (1, 2, 4):
                ex = chain_cover(inst.space, B, inst.eps, m, method="exact", graph=graph)
                gr = chain_cover(inst.space, B, inst.eps, m, method="greedy", graph=graph)
                exact[m] = ex.size
                if not ex.verify(graph) or not gr.verify(graph):
                    details.append((k, m, "invalid cover"))
                if gr.size > (1 + math.log(len(B))) * ex.size + TOL:
                    details.append((k, m, "greedy ratio", gr.size, ex.size))
                # brute force over all center subsets
                hops = literal_hops(np.asarray(inst.space.dist), inst.eps)[:, B]
                if brute_min_cover((hops >= 0) & (hops <= m)) != ex.size:
                    details.append((k, m, "exact not minimum"))
            met = components_met(graph, B)
            if not exact[1] >= exact[2] >= exact[4] >= met:
                details.append((k, "chain", exact, met))
        return k

    return _run("cover-size chain and greedy quality", body)


def prop_oscillation(seed: int, count: int = SUITE1_INSTANCES, m_max: int = 4) -> PropertyResult:
    """``f = rho(., x0)`` oscillates by at most ``m * eps`` on every ``B^m(x, eps)``."""

    def body(details):
        rng = np.random.default_rng([seed, 9])
        k = 0
        for k, inst in enumerate(suite1_instances(seed, count), start=1):
            graph, _, rho = _rho_parts(inst)
            x0 = int(rng.integers(inst.n))
            f = rho.matrix()[:, x0]
            witness = check_lipschitz_small(inst.space, f, 1.0, inst.eps)
            if not witness.ok:
                details.append((k, "not 1-LS"))
                continue
            for x in range(inst.n):
                for m in range(1, m_max + 1):
                    res = oscillation_check(inst.space, f, x, m, 1.0, inst.eps, graph=graph, witness=witness)
                    if not res.ok:
                        details.append((k, x, m, res.oscillation, res.bound))
        return k

    return _run("oscillation on chain-balls", body)


SUITES = {
    "metric": (prop_chain_distance_oracle, prop_chain_metric_axioms, prop_hop_bound),
    "rho": (prop_rho_triangle, prop_rho_formula, prop_local_identity),
    "lemma": (prop_forward_bound, prop_reverse_cover, prop_label_images),
    "cover": (prop_cover_chain,),
    "oscillation": (prop_oscillation,),
}


def run_suite(name: str = "all", seed: int = 0, instances: Optional[int] = None) -> list:
    """Run one suite (or ``"all"``) and return its :class:`PropertyResult` list."""
    if name == "all":
        props = [p for group in SUITES.values() for p in group]
    elif name in SUITES:
        props = list(SUITES[name])
    else:
        raise ValueError(f"unknown suite {name!r}; expected all or one of {', '.join(SUITES)}")
    results = []
    for prop in props:
        results.append(prop(seed) if instances is None else prop(seed, instances))
    return results


def format_table(results: list) -> str:
    width = max(len(r.property) for r in results) if results else 10
    lines = [f"{'property':<{width}}  instances  failures  seconds  status"]
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{r.property:<{width}}  {r.instances:>9}  {r.failures:>8}  {r.seconds:>7.2f}  {status}")
    return "\n".join(lines)
