"""Synthetic temporal-edge-stream generators.

Two generators back the test suite and the bundled demo dataset: a bursty
stream whose span-based snapshots have wildly uneven edge counts, and a
community stream whose structure drifts over time so that recent edges
predict the next window better than old ones.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from .stream import EdgeStream, canonicalize, from_triples


def bursty_stream(
    n_nodes: int = 200,
    n_edges: int = 10_000,
    burst_size: float = 200.0,
    gap_scale: float = 50.0,
    burst_span: float = 1.0,
    seed: int = 0,
) -> EdgeStream:
    """Edges arriving in Poisson-sized bursts separated by long quiet gaps.

    Burst sizes are 1 + Poisson(burst_size), burst start times are spaced
    by Exponential(gap_scale), and each burst's edges land uniformly inside
    ``burst_span`` time units.  Endpoints are uniform ordered pairs.
    """
    rng = np.random.default_rng(seed)
    triples: list[tuple[str, str, float]] = []
    t = 0.0
    while len(triples) < n_edges:
        t += rng.exponential(gap_scale)
        size = 1 + rng.poisson(burst_size)
        times = t + rng.uniform(0.0, burst_span, size)
        for k in range(size):
            u = int(rng.integers(n_nodes))
            v = int(rng.integers(n_nodes - 1))
            if v >= u:
                v += 1
            triples.append((str(u), str(v), float(times[k])))
    return canonicalize(from_triples(triples[:n_edges], directed=True))


def drifting_community_stream(
    seed: int = 0,
    n_nodes: int = 200,
    n_communities: int = 5,
    n_epochs: int = 20,
    epoch_len: int = 700,
    burst_size: float = 250.0,
    gap_scale: float = 2.0,
    burst_span: float = 0.5,
    busy_period: float = 50.0,
    busy_duty: float = 0.5,
    busy_phase: float = 0.0,
    quiet_frac: float = 0.4,
    drift: float = 0.2,
    intra_p: float = 0.8,
    hot_fraction: float = 0.15,
    hot_boost: float = 8.0,
    hot_swap: float = 0.35,
) -> EdgeStream:
    """Planted structure whose drift is paced by interaction count while
    arrival times stay bursty, so recent edges predict the future but
    fixed time spans see unstable slices of that recent history.

    Edges arrive in bursts (sizes 1 + Poisson(burst_size), packed into
    burst_span, separated by Exp(gap_scale) lulls).  When busy_period > 0,
    activity cycles: the first busy_duty fraction of each period is busy,
    the rest is quiet with bursts shrunk by quiet_frac; busy_phase (as a
    fraction of the period) sets where in the cycle the recording starts.
    Structure advances every epoch_len edges regardless of the clock: a
    ``drift`` fraction of nodes resamples its community and a ``hot_swap``
    fraction of the high-activity set rotates out.  Both endpoints of an
    edge are drawn with ``hot_boost`` extra weight on currently hot nodes,
    and each edge stays inside the source's community with probability
    ``intra_p``.
    """
    rng = np.random.default_rng(seed)
    total = n_epochs * epoch_len
    arrivals: list[np.ndarray] = []
    produced = 0
    clock = 0.0
    while produced < total:
        size = burst_size
        if busy_period > 0.0:
            phase = (clock / busy_period + busy_phase) % 1.0
            if phase >= busy_duty:
                size = burst_size * quiet_frac
        b = 1 + int(rng.poisson(size))
        arrivals.append(clock + rng.uniform(0.0, burst_span, size=b))
        produced += b
        clock += burst_span + rng.exponential(gap_scale)
    times = np.sort(np.concatenate(arrivals))[:total]

    community = rng.integers(n_communities, size=n_nodes)
    n_hot = max(1, int(round(hot_fraction * n_nodes)))
    hot = rng.choice(n_nodes, size=n_hot, replace=False)

    triples: list[tuple[str, str, float]] = []
    for k in range(n_epochs):
        if k > 0:
            movers = rng.choice(n_nodes, size=int(round(drift * n_nodes)), replace=False)
            community[movers] = rng.integers(n_communities, size=len(movers))
            n_swap = int(round(hot_swap * n_hot))
            if n_swap:
                cold = np.setdiff1d(np.arange(n_nodes), hot)
                keep = rng.choice(n_hot, size=n_hot - n_swap, replace=False)
                hot = np.concatenate(
                    [hot[keep], rng.choice(cold, size=n_swap, replace=False)]
                )
        weights = np.ones(n_nodes)
        weights[hot] = hot_boost
        weights /= weights.sum()
        members = [np.flatnonzero(community == c) for c in range(n_communities)]
        member_w = [weights[m] / weights[m].sum() for m in members]

        epoch_times = times[k * epoch_len : (k + 1) * epoch_len]
        sources = rng.choice(n_nodes, size=epoch_len, p=weights)
        for t, u in zip(epoch_times, sources):
            own = members[community[u]]
            if rng.random() < intra_p and len(own) > 1:
                v = u
                while v == u:
                    v = int(rng.choice(own, p=member_w[community[u]]))
            else:
                v = u
                while v == u:
                    v = int(rng.choice(n_nodes, p=weights))
            triples.append((str(int(u)), str(v), float(t)))
    return canonicalize(from_triples(triples, directed=True))


def write_edge_list(stream: EdgeStream, path: str | Path) -> None:
    """Write tab-separated ``src dst timestamp`` lines, full float precision."""
    lines = [
        f"{stream.node_ids[e.src]}\t{stream.node_ids[e.dst]}\t{e.time!r}"
        for e in stream.edges
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Regenerate the bundled synthetic dataset."
    )
    parser.add_argument("--out", default="data/synthetic.tsv", help="output path")
    parser.add_argument("--seed", type=int, default=0, help="generator seed")
    args = parser.parse_args(argv)
    stream = drifting_community_stream(seed=args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(stream, args.out)
    print(f"wrote {stream.n_edges} edges over {stream.n_nodes} nodes to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
