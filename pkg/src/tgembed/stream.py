"""Parsing and canonicalization of timestamped edge streams.

An edge stream is a sequence of (source, destination, timestamp) contacts
read from a plain-text edge list. Node labels are mapped to a dense integer
index on first appearance; the label table travels with the stream so every
export can translate back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence


class EdgeStreamError(ValueError):
    """Raised for unreadable files or malformed edge records."""


@dataclass(frozen=True)
class TemporalEdge:
    """A single timestamped contact, endpoints as dense node indices."""

    src: int
    dst: int
    time: float


@dataclass(frozen=True)
class EdgeStream:
    """An immutable sequence of temporal edges over a fixed node universe.

    ``node_ids[i]`` is the original label of internal index ``i``; the node
    universe is exactly ``range(len(node_ids))`` and equals the set of all
    endpoints. ``canonical`` is set once edges are sorted by timestamp.
    """

    edges: tuple[TemporalEdge, ...]
    node_ids: tuple[str, ...]
    directed: bool
    canonical: bool = False

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def index_of(self, label: str) -> int:
        return self.node_ids.index(label)


def _split_line(line: str) -> list[str]:
    if "," in line:
        return [f.strip() for f in line.split(",")]
    return line.split()


def parse_edge_stream(
    path: str | Path,
    fmt: str = "auto",
    directed: bool = True,
    skip_malformed: bool = False,
) -> EdgeStream:
    """Read an edge list file into an (uncanonicalized) EdgeStream.

    Layout: one edge per line, whitespace- or comma-separated columns
    ``src dst timestamp`` with an optional fourth weight column (ignored).
    Lines starting with ``%`` or ``#`` are comments. ``fmt`` is one of
    ``auto`` (sniff separator per line), ``whitespace``, or ``csv``.

    Malformed records (wrong column count, non-numeric / negative /
    non-finite timestamp, empty endpoint) raise EdgeStreamError with the
    line number, or are skipped when ``skip_malformed`` is set.
    """
    if fmt not in ("auto", "whitespace", "csv"):
        raise EdgeStreamError(f"unknown edge-list format: {fmt!r}")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise EdgeStreamError(f"cannot read edge list {path}: {exc}") from exc

    index: dict[str, int] = {}
    labels: list[str] = []
    edges: list[TemporalEdge] = []

    def node(label: str) -> int:
        idx = index.get(label)
        if idx is None:
            idx = len(labels)
            index[label] = idx
            labels.append(label)
        return idx

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("%", "#")):
            continue
        if fmt == "csv":
            fields = [f.strip() for f in line.split(",")]
        elif fmt == "whitespace":
            fields = line.split()
        else:
            fields = _split_line(line)
        problem = None
        if len(fields) not in (3, 4):
            problem = f"expected 3 or 4 columns, got {len(fields)}"
        elif not fields[0] or not fields[1]:
            problem = "empty node identifier"
        else:
            try:
                t = float(fields[2])
            except ValueError:
                problem = f"non-numeric timestamp {fields[2]!r}"
            else:
                if not math.isfinite(t):
                    problem = f"non-finite timestamp {fields[2]!r}"
                elif t < 0:
                    problem = f"negative timestamp {t}"
        if problem is not None:
            if skip_malformed:
                continue
            raise EdgeStreamError(f"{path}:{lineno}: {problem}")
        edges.append(TemporalEdge(node(fields[0]), node(fields[1]), t))

    return EdgeStream(tuple(edges), tuple(labels), directed)


def from_triples(
    triples: Iterable[tuple[str, str, float]], directed: bool = True
) -> EdgeStream:
    """Build an EdgeStream from in-memory (src, dst, time) label triples."""
    index: dict[str, int] = {}
    labels: list[str] = []
    edges: list[TemporalEdge] = []
    for u, v, t in triples:
        t = float(t)
        if not math.isfinite(t) or t < 0:
            raise EdgeStreamError(f"bad timestamp {t!r} for edge ({u}, {v})")
        for lab in (u, v):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        edges.append(TemporalEdge(index[u], index[v], t))
    return EdgeStream(tuple(edges), tuple(labels), directed)


def canonicalize(stream: EdgeStream) -> EdgeStream:
    """Stably sort edges by timestamp; idempotent.

    Ties keep their original relative order, and duplicate (u, v, t)
    records are retained: multiplicity feeds the frequency weights of the
    snapshot and summary-graph models.
    """
    if stream.canonical:
        return stream
    ordered = tuple(sorted(stream.edges, key=lambda e: e.time))
    return replace(stream, edges=ordered, canonical=True)


def slice_stream(stream: EdgeStream, edges: Sequence[TemporalEdge]) -> EdgeStream:
    """A stream containing ``edges`` but sharing the parent's node universe."""
    return replace(stream, edges=tuple(edges))


def write_id_table(stream: EdgeStream, path: str | Path) -> None:
    """Persist the node id <-> index table as CSV ``index,label``."""
    lines = ["index,label"]
    lines += [f"{i},{lab}" for i, lab in enumerate(stream.node_ids)]
    Path(path).write_text("\n".join(lines) + "\n")
