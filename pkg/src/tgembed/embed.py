"""Per-snapshot node embeddings and temporal fusion.

Two in-repo base methods cover the proximity/role dichotomy: a spectral
factorization of the weight matrix and a structural feature expansion.
Both return full-height matrices over the global node universe (one row
per node, zero rows for nodes absent from the graph) so that per-snapshot
matrices stay row-aligned and can be fused across time, either by
concatenation or by the theta-smoothed recurrence.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .models import WeightedGraph, graph_to_sparse


class EmbedError(ValueError):
    """Raised for invalid embedding parameters."""


def spectral_factors(
    graph: WeightedGraph,
    d: int,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 300,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-d singular triplets (U, s, V) of the weight matrix.

    Randomized subspace iteration: alternate orthonormalized products with
    the matrix and its transpose, then recover triplets from the small
    projected matrix.  Stops when both factor residuals fall below ``tol``
    relative to the matrix norm, or after ``max_iter`` sweeps.  Directions
    with negligible singular values are zeroed, and each kept column is
    sign-fixed so its largest-magnitude entry is positive.
    """
    n = graph.n_nodes
    if not 1 <= d <= n:
        raise EmbedError(f"d must lie in [1, {n}], got {d}")
    A = graph_to_sparse(graph)
    a_norm = math.sqrt(float((A.data**2).sum())) if A.nnz else 0.0
    if a_norm == 0.0:
        return np.zeros((n, d)), np.zeros(d), np.zeros((n, d))

    rng = np.random.default_rng(seed)
    At = A.T.tocsr()
    Q = np.linalg.qr(A @ rng.standard_normal((n, d)))[0]
    U = np.zeros((n, d))
    s = np.zeros(d)
    V = np.zeros((n, d))
    for _ in range(max_iter):
        Vq = np.linalg.qr(At @ Q)[0]
        Q = np.linalg.qr(A @ Vq)[0]
        small_u, s, small_vt = np.linalg.svd(Q.T @ (A @ Vq))
        U = Q @ small_u
        V = Vq @ small_vt.T
        right = np.linalg.norm(A @ V - U * s)
        left = np.linalg.norm(At @ U - V * s)
        if max(right, left) <= tol * a_norm:
            break

    keep = s > s[0] * 1e-12
    U[:, ~keep] = 0.0
    V[:, ~keep] = 0.0
    s = np.where(keep, s, 0.0)
    for i in np.flatnonzero(keep):
        anchor = np.argmax(np.abs(U[:, i]))
        if U[anchor, i] < 0:
            U[:, i] = -U[:, i]
            V[:, i] = -V[:, i]
    return U, s, V


def spectral_embed(graph: WeightedGraph, d: int, seed: int = 0) -> np.ndarray:
    """Left singular directions scaled by singular-value square roots."""
    U, s, _ = spectral_factors(graph, d, seed)
    return U * np.sqrt(s)


def _log_bin(x: float) -> float:
    return float(math.floor(math.log2(1.0 + x)))


def structural_embed(graph: WeightedGraph, d: int) -> np.ndarray:
    """Role-flavored features expanded to d dimensions.

    Base features per node: log-binned out/in weighted degree, mean and max
    1-hop neighbor degree, and a local clustering surrogate on the
    undirected support.  Columns cycle through the base features at rising
    integer powers, then are standardized over the nodes present in the
    graph; absent nodes keep all-zero rows.  Every reduction is computed
    with exact summation, so relabeling nodes permutes rows without
    changing any value.
    """
    if d < 4:
        raise EmbedError(f"d must be at least 4, got {d}")
    n = graph.n_nodes
    out_w: list[list[float]] = [[] for _ in range(n)]
    in_w: list[list[float]] = [[] for _ in range(n)]
    adj: list[set[int]] = [set() for _ in range(n)]
    present = np.zeros(n, dtype=bool)
    for (u, v), w in graph.weights.items():
        out_w[u].append(w)
        in_w[v].append(w)
        present[u] = present[v] = True
        if not graph.directed and u != v:
            out_w[v].append(w)
            in_w[u].append(w)
        if u != v:
            adj[u].add(v)
            adj[v].add(u)

    support = np.zeros((n, n), dtype=np.int64)
    for u, nbrs in enumerate(adj):
        for v in nbrs:
            support[u, v] = 1
    triangles = np.diag(support @ support @ support) // 2

    base = np.zeros((n, 5))
    for u in range(n):
        base[u, 0] = _log_bin(math.fsum(out_w[u]))
        base[u, 1] = _log_bin(math.fsum(in_w[u]))
        degs = [len(adj[v]) for v in adj[u]]
        k = len(degs)
        base[u, 2] = math.fsum(degs) / k if k else 0.0
        base[u, 3] = max(degs, default=0)
        base[u, 4] = triangles[u] / (k * (k - 1) / 2) if k >= 2 else 0.0

    Z = np.zeros((n, d))
    m = int(present.sum())
    for j in range(d):
        col = base[:, j % 5] ** (1 + j // 5)
        vals = col[present]
        mean = math.fsum(vals) / m if m else 0.0
        var = math.fsum((x - mean) ** 2 for x in vals) / m if m else 0.0
        if var > 0.0:
            Z[present, j] = (vals - mean) / math.sqrt(var)
    return Z


_METHODS = ("spectral", "structural")


def embed_series(
    graphs: list[WeightedGraph] | tuple[WeightedGraph, ...],
    method: str,
    d: int,
    seed: int = 0,
) -> list[np.ndarray]:
    """One embedding matrix per graph, rows aligned by the shared universe."""
    if method not in _METHODS:
        raise EmbedError(f"unknown embedding method {method!r}; expected one of {_METHODS}")
    universe = {(g.n_nodes, g.node_ids) for g in graphs}
    if len(universe) > 1:
        raise EmbedError("graphs in a series must share one node universe")
    if method == "spectral":
        return [spectral_embed(g, d, seed) for g in graphs]
    return [structural_embed(g, d) for g in graphs]


def concat_allocation(total_dim: int, count: int) -> tuple[int, ...]:
    """Per-snapshot dimensions summing to total_dim: an even floor split,
    with the remainder given to the most recent snapshot."""
    if count < 1:
        raise EmbedError("allocation needs at least one snapshot")
    each = total_dim // count
    if each < 1:
        raise EmbedError(f"cannot split {total_dim} dims over {count} snapshots")
    dims = [each] * count
    dims[-1] += total_dim - each * count
    return tuple(dims)


def fuse_concat(mats: list[np.ndarray] | tuple[np.ndarray, ...], total_dim: int) -> np.ndarray:
    """Row-wise concatenation in time order; widths must sum to total_dim."""
    if not mats:
        raise EmbedError("cannot fuse an empty series")
    widths = [m.shape[1] for m in mats]
    if sum(widths) != total_dim:
        raise EmbedError(f"snapshot dims {widths} do not sum to {total_dim}")
    return np.hstack(mats)


def fuse_smooth(mats: list[np.ndarray] | tuple[np.ndarray, ...], theta: float) -> np.ndarray:
    """Exponential smoothing across time, most recent snapshot weighted theta.

    Starts from zero and applies fused = (1-theta)*fused + theta*Z_t in time
    order, returning the final state.
    """
    if not mats:
        raise EmbedError("cannot fuse an empty series")
    if not 0.0 <= theta <= 1.0:
        raise EmbedError(f"theta must lie in [0, 1], got {theta}")
    shapes = {m.shape for m in mats}
    if len(shapes) > 1:
        raise EmbedError(f"snapshot matrices disagree in shape: {sorted(shapes)}")
    if theta == 0.0:
        warnings.warn("theta 0 discards every snapshot; fused embedding is all-zero")
    fused = np.zeros_like(mats[0])
    for mat in mats:
        fused = (1.0 - theta) * fused + theta * mat
    return fused


def embedding_to_csv(Z: np.ndarray, node_ids, path) -> None:
    """Write one ``node_id,z_1,...,z_d`` row per node."""
    d = Z.shape[1]
    header = "node_id," + ",".join(f"z_{j + 1}" for j in range(d))
    lines = [header]
    for label, row in zip(node_ids, Z):
        lines.append(str(label) + "," + ",".join(repr(float(x)) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
