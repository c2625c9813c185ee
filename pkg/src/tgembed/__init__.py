"""Temporal graph time-series models, dynamic node embeddings, and a
link-prediction evaluation harness.

The pipeline: parse a timestamped edge stream, partition it into a graph
time-series (fixed time span or fixed edge count), reduce the series with a
temporal model (snapshot counts, discounted summary, reachability, weighted
reachability, or the static union), embed each graph, fuse the per-snapshot
embeddings across time, and score the result on next-window link prediction.
"""

from .embed import (
    concat_allocation,
    embed_series,
    fuse_concat,
    fuse_smooth,
    spectral_embed,
    spectral_factors,
    structural_embed,
)
from .evaluation import (
    Alignment,
    align_protocol,
    edge_embedding,
    evaluate_embedding,
    mean_gain,
    metrics,
    positive_pairs,
    rank_models,
    sample_negatives,
    train_logistic,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    load_config,
    run_experiment,
)
from .models import (
    WeightedGraph,
    build_trg,
    build_tsg,
    build_wtrg,
    snapshot_graph,
    static_graph,
    tsg_series,
)
from .series import (
    GraphTimeSeries,
    Snapshot,
    edge_count_profile,
    partition_epsilon,
    partition_tau,
    recent_window,
)
from .stream import EdgeStream, TemporalEdge, canonicalize, from_triples, parse_edge_stream

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "EdgeStream",
    "ExperimentConfig",
    "ExperimentReport",
    "GraphTimeSeries",
    "Snapshot",
    "TemporalEdge",
    "WeightedGraph",
    "align_protocol",
    "build_trg",
    "build_tsg",
    "build_wtrg",
    "canonicalize",
    "concat_allocation",
    "edge_count_profile",
    "edge_embedding",
    "embed_series",
    "emit_report",
    "evaluate_embedding",
    "from_triples",
    "fuse_concat",
    "fuse_smooth",
    "load_config",
    "mean_gain",
    "metrics",
    "parse_edge_stream",
    "partition_epsilon",
    "partition_tau",
    "positive_pairs",
    "rank_models",
    "recent_window",
    "run_experiment",
    "sample_negatives",
    "snapshot_graph",
    "spectral_embed",
    "spectral_factors",
    "static_graph",
    "structural_embed",
    "train_logistic",
    "tsg_series",
]
