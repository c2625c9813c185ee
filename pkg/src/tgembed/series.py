"""Partitioning a canonical edge stream into graph time-series.

Two partitions are supported: fixed time-span buckets (``tau``) and fixed
edge-count groups (``epsilon``). A tau-series keeps empty buckets between
active ones (quiet periods are real); an epsilon-series keeps only complete
groups and reports how many trailing edges were left over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .stream import EdgeStream, TemporalEdge


class PartitionError(ValueError):
    """Raised for invalid partition parameters or unusable streams."""


@dataclass(frozen=True)
class PartitionSpec:
    """Which partition produced a series: ``kind`` is "tau" or "epsilon"."""

    kind: str
    tau: float | None = None
    epsilon: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "tau":
            if self.tau is None or self.epsilon is not None or self.tau <= 0:
                raise PartitionError("tau spec requires tau > 0 and no epsilon")
        elif self.kind == "epsilon":
            if self.epsilon is None or self.tau is not None or self.epsilon < 1:
                raise PartitionError("epsilon spec requires epsilon >= 1 and no tau")
        else:
            raise PartitionError(f"unknown partition kind: {self.kind!r}")


@dataclass(frozen=True)
class Snapshot:
    """One graph of the time-series: a 1-based index, its temporal edges,
    the half-open [start, end) time range, and the shared node universe."""

    index: int
    edges: tuple[TemporalEdge, ...]
    time_range: tuple[float, float]
    n_nodes: int
    directed: bool
    node_ids: tuple[str, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GraphTimeSeries:
    """Time-ordered, edge-disjoint snapshots over one node universe."""

    snapshots: tuple[Snapshot, ...]
    spec: PartitionSpec
    node_ids: tuple[str, ...]
    directed: bool
    dropped_edges: int = 0

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)


def _require_canonical(stream: EdgeStream) -> None:
    if not stream.canonical:
        raise PartitionError("stream must be canonicalized before partitioning")


def partition_tau(stream: EdgeStream, tau: float) -> GraphTimeSeries:
    """Bucket edges into consecutive time spans of width ``tau``.

    Bucket k (1-based) holds edges with t0 + (k-1)*tau <= t < t0 + k*tau,
    where t0 is the first edge's timestamp. Empty buckets between the first
    and the last occupied one are kept; the series ends with the bucket
    containing the last edge.
    """
    _require_canonical(stream)
    if tau <= 0:
        raise PartitionError(f"tau must be positive, got {tau}")
    spec = PartitionSpec("tau", tau=tau)
    if not stream.edges:
        return GraphTimeSeries((), spec, stream.node_ids, stream.directed)

    t0 = stream.edges[0].time
    buckets: list[list[TemporalEdge]] = []
    for e in stream.edges:
        k = int((e.time - t0) // tau)
        # float division can land one bucket off near boundaries
        while e.time < t0 + k * tau:
            k -= 1
        while e.time >= t0 + (k + 1) * tau:
            k += 1
        while len(buckets) <= k:
            buckets.append([])
        buckets[k].append(e)

    snaps = tuple(
        Snapshot(
            index=k + 1,
            edges=tuple(group),
            time_range=(t0 + k * tau, t0 + (k + 1) * tau),
            n_nodes=stream.n_nodes,
            directed=stream.directed,
            node_ids=stream.node_ids,
        )
        for k, group in enumerate(buckets)
    )
    return GraphTimeSeries(snaps, spec, stream.node_ids, stream.directed)


def partition_epsilon(stream: EdgeStream, epsilon: int) -> GraphTimeSeries:
    """Group the stream into consecutive blocks of exactly ``epsilon`` edges.

    Group k holds edges (k-1)*epsilon+1 .. k*epsilon in stream order. A
    trailing incomplete group is excluded from the series and counted in
    ``dropped_edges``. Equal timestamps split mechanically at group
    boundaries (the stream order is already deterministic).
    """
    _require_canonical(stream)
    if epsilon < 1:
        raise PartitionError(f"epsilon must be >= 1, got {epsilon}")
    spec = PartitionSpec("epsilon", epsilon=epsilon)
    n_complete = len(stream.edges) // epsilon
    dropped = len(stream.edges) - n_complete * epsilon

    snaps = []
    for k in range(n_complete):
        group = stream.edges[k * epsilon : (k + 1) * epsilon]
        start = group[0].time
        end = math.nextafter(group[-1].time, math.inf)
        snaps.append(
            Snapshot(
                index=k + 1,
                edges=tuple(group),
                time_range=(start, end),
                n_nodes=stream.n_nodes,
                directed=stream.directed,
                node_ids=stream.node_ids,
            )
        )
    return GraphTimeSeries(
        tuple(snaps), spec, stream.node_ids, stream.directed, dropped_edges=dropped
    )


def recent_window(series: GraphTimeSeries, window: int) -> GraphTimeSeries:
    """Keep only the last min(window, T) snapshots, indices preserved."""
    if window < 1:
        raise PartitionError(f"window must be >= 1, got {window}")
    if window >= len(series.snapshots):
        return series
    return replace(series, snapshots=series.snapshots[-window:])


def edge_count_profile(series: GraphTimeSeries) -> list[int]:
    """Number of temporal edges per snapshot, in series order."""
    return [snap.n_edges for snap in series.snapshots]


def profile_to_csv(series: GraphTimeSeries, path: str | Path) -> None:
    """Write the per-snapshot edge counts as ``snapshot_index,edge_count``."""
    lines = ["snapshot_index,edge_count"]
    lines += [f"{s.index},{s.n_edges}" for s in series.snapshots]
    Path(path).write_text("\n".join(lines) + "\n")
