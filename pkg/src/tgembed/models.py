"""Temporal models: reductions of temporal edges to weighted graphs.

Five reductions are implemented.  Snapshot counting and the static union
drop timestamps entirely.  The discounted model folds a whole series into
one graph with exponentially decaying snapshot weights.  The reachability
models connect i to k when a time-respecting walk (strictly increasing
timestamps along consecutive edges) leads from i to k; the weighted variant
scores each walk by e^(-duration) and sums over all walks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .series import GraphTimeSeries, Snapshot
from .stream import EdgeStream


class ModelError(ValueError):
    """Raised for invalid model parameters."""


@dataclass(frozen=True)
class WeightedGraph:
    """Weighted arcs over a fixed node universe.

    Undirected graphs store one weight per unordered pair under the
    (min, max) key; lookups and matrices mirror it.
    """

    weights: dict[tuple[int, int], float]
    n_nodes: int
    directed: bool
    node_ids: tuple[str, ...]

    @property
    def n_arcs(self) -> int:
        return len(self.weights)

    def weight(self, u: int, v: int) -> float:
        key = (u, v) if self.directed or u <= v else (v, u)
        return self.weights.get(key, 0.0)

    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.weights)


def graph_to_dense(graph: WeightedGraph) -> np.ndarray:
    out = np.zeros((graph.n_nodes, graph.n_nodes))
    for (u, v), w in graph.weights.items():
        out[u, v] = w
        if not graph.directed:
            out[v, u] = w
    return out


def graph_to_sparse(graph: WeightedGraph) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for (u, v), w in graph.weights.items():
        rows.append(u)
        cols.append(v)
        vals.append(w)
        if not graph.directed and u != v:
            rows.append(v)
            cols.append(u)
            vals.append(w)
    n = graph.n_nodes
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _count_key(u: int, v: int, directed: bool) -> tuple[int, int]:
    return (u, v) if directed or u <= v else (v, u)


def snapshot_graph(snapshot: Snapshot) -> WeightedGraph:
    """Count multiplicities of each (src, dst) pair, timestamps dropped."""
    weights: dict[tuple[int, int], float] = {}
    for e in snapshot.edges:
        key = _count_key(e.src, e.dst, snapshot.directed)
        weights[key] = weights.get(key, 0.0) + 1.0
    return WeightedGraph(weights, snapshot.n_nodes, snapshot.directed, snapshot.node_ids)


def static_graph(stream: EdgeStream) -> WeightedGraph:
    """Union of every edge in the stream, weighted by multiplicity."""
    weights: dict[tuple[int, int], float] = {}
    for e in stream.edges:
        key = _count_key(e.src, e.dst, stream.directed)
        weights[key] = weights.get(key, 0.0) + 1.0
    return WeightedGraph(weights, stream.n_nodes, stream.directed, stream.node_ids)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ModelError(f"alpha must lie in (0, 1), got {alpha}")


def build_tsg(series: GraphTimeSeries, alpha: float) -> WeightedGraph:
    """Discounted sum of snapshot adjacency counts over the whole series.

    Snapshot t of T contributes its multiplicities scaled by (1-alpha)^(T-t),
    so the most recent snapshot enters at full weight and older ones fade
    geometrically.
    """
    _check_alpha(alpha)
    T = len(series.snapshots)
    decay = 1.0 - alpha
    weights: dict[tuple[int, int], float] = {}
    for pos, snap in enumerate(series.snapshots, start=1):
        scale = decay ** (T - pos)
        for e in snap.edges:
            key = _count_key(e.src, e.dst, series.directed)
            weights[key] = weights.get(key, 0.0) + scale
    return WeightedGraph(weights, series.n_nodes, series.directed, series.node_ids)


def tsg_series(
    series: GraphTimeSeries, alpha: float, window: int
) -> tuple[WeightedGraph, ...]:
    """Sliding discounted sums: one graph per position t = window+1 .. T,
    each folding the preceding ``window`` snapshots into snapshot t.

    ``window`` = 0 reproduces the plain snapshot counts (one graph per
    snapshot); ``window`` = T-1 leaves a single graph equal to the
    whole-series discounted sum.
    """
    _check_alpha(alpha)
    T = len(series.snapshots)
    if not 0 <= window <= T - 1:
        raise ModelError(f"window must lie in [0, {T - 1}], got {window}")
    decay = 1.0 - alpha
    out = []
    for t in range(window + 1, T + 1):
        weights: dict[tuple[int, int], float] = {}
        for k in range(t - window, t + 1):
            scale = decay ** (t - k)
            for e in series.snapshots[k - 1].edges:
                key = _count_key(e.src, e.dst, series.directed)
                weights[key] = weights.get(key, 0.0) + scale
        out.append(
            WeightedGraph(weights, series.n_nodes, series.directed, series.node_ids)
        )
    return tuple(out)


def _directed_arcs(snapshot: Snapshot) -> list[tuple[int, int, float]]:
    """Arc view of a window: undirected contacts expand to both directions."""
    arcs = []
    for e in snapshot.edges:
        arcs.append((e.src, e.dst, e.time))
        if not snapshot.directed and e.src != e.dst:
            arcs.append((e.dst, e.src, e.time))
    return arcs


def _rescaled(arcs: list[tuple[int, int, float]]) -> list[tuple[int, int, float]]:
    """Map timestamps affinely onto [0, 1]; constant-time windows go to 0."""
    if not arcs:
        return arcs
    lo = min(t for _, _, t in arcs)
    hi = max(t for _, _, t in arcs)
    if hi == lo:
        return [(u, v, 0.0) for u, v, t in arcs]
    span = hi - lo
    return [(u, v, (t - lo) / span) for u, v, t in arcs]


def _time_groups_desc(arcs: list[tuple[int, int, float]]):
    """Yield maximal equal-timestamp runs in decreasing time order."""
    ordered = sorted(arcs, key=lambda a: a[2], reverse=True)
    group: list[tuple[int, int, float]] = []
    for arc in ordered:
        if group and arc[2] != group[0][2]:
            yield group
            group = []
        group.append(arc)
    if group:
        yield group


def build_trg(snapshot: Snapshot) -> WeightedGraph:
    """Unit-weight arc (i, k) for every pair joined by a time-respecting walk.

    One reverse pass over the window: after all arcs later than time t are
    absorbed, reach[v] holds every node reachable from v along walks whose
    first arc is later than t.  Equal-timestamp arcs are staged and merged
    only once their whole group is processed, so they never chain with each
    other.
    """
    reach: dict[int, set[int]] = {}
    for group in _time_groups_desc(_directed_arcs(snapshot)):
        staged: dict[int, set[int]] = {}
        for i, j, _ in group:
            add = staged.setdefault(i, set())
            add.add(j)
            add.update(reach.get(j, ()))
        for i, add in staged.items():
            reach.setdefault(i, set()).update(add)
    weights = {(i, k): 1.0 for i, nodes in reach.items() for k in nodes}
    return WeightedGraph(weights, snapshot.n_nodes, True, snapshot.node_ids)


@dataclass(frozen=True)
class WtrgStats:
    """Cost accounting for one weighted-reachability build.

    ``omega`` is the number of arcs swept (undirected contacts count twice),
    ``max_reach`` the largest reach-map size over all nodes, ``insertions``
    the total number of reach-map staging operations.
    """

    omega: int
    max_reach: int
    insertions: int
    n_arcs: int


def build_wtrg(
    snapshot: Snapshot, rescale_times: bool = False
) -> tuple[WeightedGraph, WtrgStats]:
    """Arc weights g(i, k) = sum over time-respecting walks i -> k of
    e^(-duration), where duration spans the walk's first to last timestamp.

    Reverse pass over the window.  reach[j] maps (k, t_k) to the number of
    walks from j ending with an arc at time t_k, over arcs strictly later
    than the sweep position.  An arc (i, j, t) then adds one direct walk
    plus every continuation through j, each discounted by e^(-(t_k - t)).
    Keying on (k, t_k) keeps at most one entry per later arc, so no reach
    map outgrows the window; the multiplicity keeps the weights exact when
    distinct walks share their final arc.  Equal-timestamp groups are staged
    like in the unweighted build.

    With ``rescale_times`` the window's timestamps are first mapped onto
    [0, 1] so the discount never underflows on wide-span windows.
    """
    arcs = _directed_arcs(snapshot)
    if rescale_times:
        arcs = _rescaled(arcs)
    omega = len(arcs)

    g: dict[tuple[int, int], float] = {}
    reach: dict[int, dict[tuple[int, float], int]] = {}
    insertions = 0
    for group in _time_groups_desc(arcs):
        staged: dict[int, dict[tuple[int, float], int]] = {}
        for i, j, t in group:
            g[(i, j)] = g.get((i, j), 0.0) + 1.0
            add = staged.setdefault(i, {})
            add[(j, t)] = add.get((j, t), 0) + 1
            insertions += 1
            for (k, t_k), mult in reach.get(j, {}).items():
                g[(i, k)] = g.get((i, k), 0.0) + mult * math.exp(-(t_k - t))
                add[(k, t_k)] = add.get((k, t_k), 0) + mult
                insertions += 1
        for i, add in staged.items():
            into = reach.setdefault(i, {})
            for key, mult in add.items():
                into[key] = into.get(key, 0) + mult

    max_reach = max((len(m) for m in reach.values()), default=0)
    assert max_reach <= omega, "reach map exceeded window size"
    assert insertions <= omega * omega, "staging exceeded the sweep budget"
    stats = WtrgStats(omega, max_reach, insertions, len(g))
    graph = WeightedGraph(g, snapshot.n_nodes, True, snapshot.node_ids)
    return graph, stats
