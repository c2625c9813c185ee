"""Link-prediction evaluation: protocol alignment, negative sampling, an
in-repo logistic classifier, threshold metrics, and the ranking and gain
tables used to compare temporal models.

The alignment step fixes one hold-out snapshot and derives both training
views from it: the span-based series takes the ``train_count`` windows
right before the hold-out, and the count-based series re-groups the
training prefix into windows of exactly the hold-out's edge count,
anchored so the last group ends at the hold-out boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .series import GraphTimeSeries, Snapshot, partition_epsilon, partition_tau, recent_window
from .stream import EdgeStream, slice_stream


class EvalError(ValueError):
    """Raised for protocol violations and degenerate evaluation inputs."""


@dataclass(frozen=True)
class Alignment:
    """Both training views plus the shared hold-out snapshot.

    ``eps_skipped`` counts the oldest prefix edges left out so that the
    count-based groups end exactly at the hold-out boundary.
    """

    tau_full: GraphTimeSeries
    tau_train: GraphTimeSeries
    eps_train: GraphTimeSeries
    test_snapshot: Snapshot
    epsilon: int
    offset: int
    train_stream: EdgeStream
    eps_skipped: int


def align_protocol(
    stream: EdgeStream,
    tau: float,
    train_count: int = 6,
    offset: int | None = None,
) -> Alignment:
    """Pick the hold-out snapshot and build the two aligned training series.

    The span-based series is partitioned over the whole stream; snapshots
    offset+1 .. offset+train_count train and snapshot offset+train_count+1
    is the hold-out.  ``offset`` defaults to a third of the series and is
    clamped so the hold-out exists.  The count-based window size is the
    hold-out's edge count, and its training series keeps the last
    ``train_count`` complete groups of the prefix.
    """
    if train_count < 1:
        raise EvalError(f"train_count must be >= 1, got {train_count}")
    tau_full = partition_tau(stream, tau)
    total = len(tau_full)
    if total < train_count + 1:
        raise EvalError(
            f"need at least {train_count + 1} snapshots, the stream gives {total}"
        )
    if offset is None:
        offset = total // 3
    offset = max(0, min(offset, total - (train_count + 1)))

    train_snaps = tau_full.snapshots[offset : offset + train_count]
    test_snapshot = tau_full.snapshots[offset + train_count]
    epsilon = test_snapshot.n_edges
    if epsilon == 0:
        raise EvalError("the hold-out snapshot holds no edges")

    prefix_len = sum(s.n_edges for s in tau_full.snapshots[: offset + train_count])
    skip = prefix_len % epsilon
    eps_stream = slice_stream(stream, stream.edges[skip:prefix_len])
    if not eps_stream.edges:
        raise EvalError("training prefix is shorter than one count-based window")
    eps_train = recent_window(partition_epsilon(eps_stream, epsilon), train_count)

    train_first = prefix_len - sum(s.n_edges for s in train_snaps)
    train_stream = slice_stream(stream, stream.edges[train_first:prefix_len])
    tau_train = GraphTimeSeries(
        train_snaps, tau_full.spec, tau_full.node_ids, tau_full.directed
    )
    return Alignment(
        tau_full=tau_full,
        tau_train=tau_train,
        eps_train=eps_train,
        test_snapshot=test_snapshot,
        epsilon=epsilon,
        offset=offset,
        train_stream=train_stream,
        eps_skipped=skip,
    )


def _pair_key(u: int, v: int, directed: bool) -> tuple[int, int]:
    return (u, v) if directed or u <= v else (v, u)


def positive_pairs(test: Snapshot) -> list[tuple[int, int]]:
    """Distinct node pairs of the hold-out snapshot, self-loops dropped."""
    pairs = {
        _pair_key(e.src, e.dst, test.directed) for e in test.edges if e.src != e.dst
    }
    return sorted(pairs)


def sample_negatives(
    test: Snapshot,
    universe: list[int] | tuple[int, ...] | None,
    count: int,
    seed: int,
) -> list[tuple[int, int]]:
    """Rejection-sample ``count`` distinct pairs absent from the hold-out.

    Pairs are drawn uniformly over ``universe`` (all nodes when None), skip
    self-pairs and hold-out edges, and come out deterministic given seed.
    """
    nodes = np.arange(test.n_nodes) if universe is None else np.asarray(universe)
    n = len(nodes)
    node_set = set(int(x) for x in nodes)
    forbidden = {
        _pair_key(e.src, e.dst, test.directed)
        for e in test.edges
        if e.src in node_set and e.dst in node_set
    }
    total = n * (n - 1) if test.directed else n * (n - 1) // 2
    available = total - sum(1 for (u, v) in forbidden if u != v)
    if count > available:
        raise EvalError(f"only {available} non-edges available, need {count}")

    rng = np.random.default_rng(seed)
    chosen: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while len(chosen) < count:
        draws = rng.integers(0, n, size=(max(1024, 2 * (count - len(chosen))), 2))
        for a, b in draws:
            if a == b:
                continue
            pair = _pair_key(int(nodes[a]), int(nodes[b]), test.directed)
            if pair in forbidden or pair in seen:
                continue
            seen.add(pair)
            chosen.append(pair)
            if len(chosen) == count:
                break
    return chosen


def edge_embedding(Z: np.ndarray, i: int, j: int) -> np.ndarray:
    """Feature vector of a node pair: the two embedding rows concatenated."""
    n = Z.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise EvalError(f"pair ({i}, {j}) outside the node universe of size {n}")
    return np.concatenate([Z[i], Z[j]])


def edge_feature_matrix(Z: np.ndarray, pairs: list[tuple[int, int]]) -> np.ndarray:
    idx = np.asarray(pairs, dtype=int).reshape(-1, 2)
    return np.hstack([Z[idx[:, 0]], Z[idx[:, 1]]])


@dataclass(frozen=True)
class LogisticModel:
    """A fitted linear classifier: p(y=1 | x) = sigmoid(w.x + b)."""

    weights: np.ndarray
    bias: float
    n_iter: int
    converged: bool
    losses: tuple[float, ...]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(np.asarray(X, dtype=float) @ self.weights + self.bias)


def logistic_loss(
    features: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    bias: float,
    reg_strength: float = 1.0,
) -> float:
    """Mean log-loss plus reg_strength/2 * |w|^2; the bias goes unpenalized."""
    z = features @ weights + bias
    data = float(np.mean(np.logaddexp(0.0, z) - labels * z))
    return data + 0.5 * reg_strength * float(weights @ weights)


def logistic_gradient(
    features: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    bias: float,
    reg_strength: float = 1.0,
) -> tuple[np.ndarray, float]:
    """Gradient of logistic_loss in (weights, bias)."""
    p = expit(features @ weights + bias)
    gw = features.T @ (p - labels) / len(labels) + reg_strength * weights
    gb = float(np.mean(p - labels))
    return gw, gb


def train_logistic(
    features: np.ndarray,
    labels: np.ndarray,
    reg_strength: float = 1.0,
    tol: float = 1e-4,
    max_iter: int = 1000,
) -> LogisticModel:
    """L2-regularized logistic regression by gradient descent.

    Minimizes mean log-loss plus reg_strength/2 * |w|^2 (bias free of the
    penalty) with backtracking line search, stopping once the gradient norm
    drops below ``tol`` or after ``max_iter`` steps.  The line search only
    accepts decreasing steps, so the recorded losses are monotone.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise EvalError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
    if not np.isfinite(X).all():
        raise EvalError("features contain non-finite values")
    if not (np.any(y == 1.0) and np.any(y == 0.0)):
        raise EvalError("training needs at least one example of each class")
    dim = X.shape[1]

    w = np.zeros(dim)
    b = 0.0
    current = logistic_loss(X, y, w, b, reg_strength)
    losses = [current]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        gw, gb = logistic_gradient(X, y, w, b, reg_strength)
        gnorm_sq = float(gw @ gw) + gb * gb
        if math.sqrt(gnorm_sq) < tol:
            converged = True
            it -= 1
            break
        step = 1.0
        while True:
            cand = logistic_loss(X, y, w - step * gw, b - step * gb, reg_strength)
            if cand <= current - 1e-4 * step * gnorm_sq or step < 1e-12:
                break
            step *= 0.5
        if cand >= current:
            break
        w = w - step * gw
        b = b - step * gb
        current = cand
        losses.append(current)
    return LogisticModel(w, b, it, converged, tuple(losses))


def _auc(scores: np.ndarray, labels: np.ndarray) -> float:
    ranks = rankdata(scores)
    pos = labels == 1.0
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def metrics(scores: np.ndarray, labels: np.ndarray) -> tuple[float, float, float]:
    """(AUC, ACC, F1) of probability scores against binary labels.

    AUC comes from the rank statistic with ties counted half; ACC and F1
    threshold the scores at 0.5, F1 on the positive class.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if not (np.any(y == 1.0) and np.any(y == 0.0)):
        raise EvalError("metrics need both classes present")
    auc = _auc(s, y)
    pred = s >= 0.5
    acc = float(np.mean(pred == (y == 1.0)))
    tp = float(np.sum(pred & (y == 1.0)))
    fp = float(np.sum(pred & (y == 0.0)))
    fn = float(np.sum(~pred & (y == 1.0)))
    f1 = 2 * tp / (2 * tp + fp + fn) if tp > 0 else 0.0
    return auc, acc, f1


def split_indices(
    n: int, train_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Shuffled train/eval split keeping at least one item on each side."""
    if n < 2:
        raise EvalError("need at least two examples to split")
    order = rng.permutation(n)
    k = int(round(train_fraction * n))
    k = min(max(k, 1), n - 1)
    return order[:k], order[k:]


def evaluate_embedding(
    Z: np.ndarray,
    positives: list[tuple[int, int]],
    negatives: list[tuple[int, int]],
    train_fraction: float = 0.75,
    seed: int = 0,
    reg_strength: float = 1.0,
    tol: float = 1e-4,
    max_iter: int = 1000,
) -> tuple[float, float, float]:
    """Stratified split of labeled pairs, classifier fit, hold-out metrics.

    Feature columns are standardized with training-split statistics so the
    fit is insensitive to the wildly different weight scales the temporal
    models can produce; constant columns are dropped to zero.
    """
    if not 0.0 < train_fraction < 1.0:
        raise EvalError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    pos_tr, pos_ev = split_indices(len(positives), train_fraction, rng)
    neg_tr, neg_ev = split_indices(len(negatives), train_fraction, rng)
    Xp = edge_feature_matrix(Z, positives)
    Xn = edge_feature_matrix(Z, negatives)
    X_tr = np.vstack([Xp[pos_tr], Xn[neg_tr]])
    y_tr = np.concatenate([np.ones(len(pos_tr)), np.zeros(len(neg_tr))])
    X_ev = np.vstack([Xp[pos_ev], Xn[neg_ev]])
    y_ev = np.concatenate([np.ones(len(pos_ev)), np.zeros(len(neg_ev))])
    center = X_tr.mean(axis=0)
    scale = X_tr.std(axis=0)
    scale[scale == 0.0] = np.inf
    X_tr = (X_tr - center) / scale
    X_ev = (X_ev - center) / scale
    model = train_logistic(X_tr, y_tr, reg_strength, tol, max_iter)
    return metrics(model.predict_proba(X_ev), y_ev)


@dataclass(frozen=True)
class MetricRecord:
    """One evaluation cell: a temporal model scored by one base method."""

    dataset: str
    method: str
    model: str
    auc: float
    acc: float
    f1: float


_CRITERIA = ("auc", "acc", "f1")


@dataclass(frozen=True)
class RankTable:
    """First-rank counts per model and criterion, plus the total score."""

    models: tuple[str, ...]
    criteria: tuple[str, ...]
    counts: dict[str, dict[str, int]]
    scores: dict[str, int]


def rank_models(records: list[MetricRecord] | tuple[MetricRecord, ...]) -> RankTable:
    """Award one first-rank per (dataset, method, criterion) cell to every
    model attaining the cell's maximum; ties all count. Scores sum the
    awards per model."""
    models: list[str] = []
    for r in records:
        if r.model not in models:
            models.append(r.model)
    cells: dict[tuple[str, str], dict[str, MetricRecord]] = {}
    for r in records:
        cells.setdefault((r.dataset, r.method), {})[r.model] = r
    for (dataset, method), per_model in cells.items():
        missing = [m for m in models if m not in per_model]
        if missing:
            raise EvalError(f"cell ({dataset}, {method}) lacks models {missing}")
    counts = {m: {c: 0 for c in _CRITERIA} for m in models}
    for per_model in cells.values():
        for criterion in _CRITERIA:
            best = max(getattr(per_model[m], criterion) for m in models)
            for m in models:
                if getattr(per_model[m], criterion) == best:
                    counts[m][criterion] += 1
    scores = {m: sum(counts[m].values()) for m in models}
    return RankTable(tuple(models), _CRITERIA, counts, scores)


@dataclass(frozen=True)
class GainTable:
    """Mean relative AUC gain (percent) of each model over each baseline."""

    models: tuple[str, ...]
    baselines: tuple[str, ...]
    values: dict[str, dict[str, float]]
    means: dict[str, float]


def mean_gain(
    records: list[MetricRecord] | tuple[MetricRecord, ...],
    ours: list[str] | tuple[str, ...],
    baselines: list[str] | tuple[str, ...],
) -> GainTable:
    """gain(a, b) = mean over datasets of 100 * (AUC_a - AUC_b) / AUC_b,
    with each model's per-dataset AUC first averaged over methods; the
    final column averages a model's gain over all baselines."""
    by_cell: dict[tuple[str, str], list[float]] = {}
    for r in records:
        by_cell.setdefault((r.model, r.dataset), []).append(r.auc)
    datasets = sorted({d for (_, d) in by_cell})

    def auc_of(model: str, dataset: str) -> float:
        vals = by_cell.get((model, dataset))
        if not vals:
            raise EvalError(f"no AUC for model {model!r} on dataset {dataset!r}")
        return math.fsum(vals) / len(vals)

    values: dict[str, dict[str, float]] = {}
    means: dict[str, float] = {}
    for a in ours:
        row: dict[str, float] = {}
        for b in baselines:
            gains = []
            for ds in datasets:
                ref = auc_of(b, ds)
                if ref == 0.0:
                    raise EvalError(f"baseline {b!r} has zero AUC on {ds!r}")
                gains.append(100.0 * (auc_of(a, ds) - ref) / ref)
            row[b] = math.fsum(gains) / len(gains)
        values[a] = row
        means[a] = math.fsum(row.values()) / len(row) if row else 0.0
    return GainTable(tuple(ours), tuple(baselines), values, means)
