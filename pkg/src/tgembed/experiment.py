"""Config-driven experiment runs: the full sweep from an edge-list file to
metric records, ranking and gain tables, and edge-count profiles.

A run evaluates every configured (temporal model, base method) cell against
one shared hold-out snapshot.  Cells fail in isolation: a degenerate graph
or embedding poisons its own cell, gets recorded as a failure entry, and
the sweep continues.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .embed import concat_allocation, embed_series, fuse_concat, fuse_smooth
from .evaluation import (
    Alignment,
    GainTable,
    MetricRecord,
    RankTable,
    align_protocol,
    evaluate_embedding,
    mean_gain,
    positive_pairs,
    rank_models,
    sample_negatives,
)
from .models import (
    WeightedGraph,
    build_trg,
    build_tsg,
    build_wtrg,
    snapshot_graph,
    static_graph,
)
from .stream import canonicalize, parse_edge_stream

MODEL_NAMES = (
    "sg-tau",
    "sg-eps",
    "tsg-tau",
    "tsg-eps",
    "wtrg-tau",
    "wtrg-eps",
    "trg-tau",
    "trg-eps",
    "static",
)
METHOD_NAMES = ("spectral", "structural")


class ConfigError(ValueError):
    """Raised for unusable experiment configurations."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run byte-for-byte."""

    dataset: str
    tau: float
    dataset_name: str = ""
    dataset_format: str = "auto"
    directed: bool = True
    train_count: int = 6
    offset: int | None = None
    models: tuple[str, ...] = MODEL_NAMES
    methods: tuple[str, ...] = METHOD_NAMES
    fusion: str = "smooth"
    theta: float = 0.8
    alpha: float = 0.8
    d: int = 128
    seed: int = 0
    reg_strength: float = 1.0
    tol: float = 1e-4
    max_iter: int = 1000
    train_fraction: float = 0.75
    rescale_times: bool = False
    out_dir: str = "report"
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.train_count < 1:
            raise ConfigError(f"train_count must be >= 1, got {self.train_count}")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta must lie in [0, 1], got {self.theta}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.d < 4:
            raise ConfigError(f"d must be at least 4, got {self.d}")
        if self.fusion not in ("smooth", "concat"):
            raise ConfigError(f"unknown fusion mode {self.fusion!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown report format {self.format!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}"
            )
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad or not self.models:
            raise ConfigError(f"unknown models {bad}; choose from {MODEL_NAMES}")
        bad = [m for m in self.methods if m not in METHOD_NAMES]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad}; choose from {METHOD_NAMES}")

    def echo(self) -> dict:
        out = asdict(self)
        out["models"] = list(self.models)
        out["methods"] = list(self.methods)
        return out


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a YAML or JSON config file; keyword overrides win.

    A relative dataset path is resolved against the config file's folder.
    Overrides valued None are ignored so CLI flags can pass through unset.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        raw = json.loads(text)
    else:
        import yaml

        raw = yaml.safe_load(text)
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping, got {type(raw).__name__}")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    if "dataset" not in raw or "tau" not in raw:
        raise ConfigError("config must set at least 'dataset' and 'tau'")
    dataset = Path(raw["dataset"])
    if not dataset.is_absolute():
        raw["dataset"] = str((path.parent / dataset).resolve())
    for key in ("models", "methods"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        config = ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if not config.dataset_name:
        config = replace(config, dataset_name=Path(config.dataset).stem)
    return config


@dataclass(frozen=True)
class CellFailure:
    """One (model, method) cell that could not produce a record."""

    model: str
    method: str
    stage: str
    message: str


@dataclass(frozen=True)
class ExperimentReport:
    """Everything a run produced, plus the config echo and stage timings."""

    dataset_name: str
    records: tuple[MetricRecord, ...]
    failures: tuple[CellFailure, ...]
    rank_table: RankTable | None
    gain_table: GainTable | None
    profiles: dict[str, tuple[tuple[int, int], ...]]
    config_echo: dict
    timings: dict[str, float]
    total_seconds: float
    epsilon: int
    offset: int
    eps_skipped: int


def _build_model_graphs(
    name: str, alignment: Alignment, config: ExperimentConfig
) -> list[WeightedGraph]:
    series = alignment.eps_train if name.endswith("-eps") else alignment.tau_train
    if name == "static":
        return [static_graph(alignment.train_stream)]
    if name.startswith("sg-"):
        return [snapshot_graph(s) for s in series.snapshots]
    if name.startswith("tsg-"):
        return [build_tsg(series, config.alpha)]
    if name.startswith("trg-"):
        return [build_trg(s) for s in series.snapshots]
    if name.startswith("wtrg-"):
        return [build_wtrg(s, config.rescale_times)[0] for s in series.snapshots]
    raise ConfigError(f"unknown model {name!r}")


def _fused_embedding(graphs, method, config: ExperimentConfig):
    if len(graphs) == 1:
        return embed_series(graphs, method, config.d, config.seed)[0]
    if config.fusion == "smooth":
        mats = embed_series(graphs, method, config.d, config.seed)
        return fuse_smooth(mats, config.theta)
    dims = concat_allocation(config.d, len(graphs))
    mats = [
        embed_series([g], method, dim, config.seed)[0]
        for g, dim in zip(graphs, dims)
    ]
    return fuse_concat(mats, config.d)


def run_experiment(
    config: ExperimentConfig, profile_only: bool = False
) -> ExperimentReport:
    """Execute parse -> align -> sample -> per-cell evaluation -> tables.

    With ``profile_only`` the run stops after building model graphs and
    reports only edge-count profiles.  Exceptions before the cell stage
    (unreadable dataset, too few snapshots, degenerate hold-out) abort the
    run; per-cell errors are collected as failure entries instead.
    """
    timings: dict[str, float] = {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    stream = canonicalize(
        parse_edge_stream(
            config.dataset, fmt=config.dataset_format, directed=config.directed
        )
    )
    timings["parse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    alignment = align_protocol(stream, config.tau, config.train_count, config.offset)
    timings["align"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    positives: list[tuple[int, int]] = []
    negatives: list[tuple[int, int]] = []
    if not profile_only:
        positives = positive_pairs(alignment.test_snapshot)
        if len(positives) < 2:
            raise ConfigError(
                "hold-out snapshot yields fewer than two distinct positive pairs"
            )
        negatives = sample_negatives(
            alignment.test_snapshot, None, len(positives), config.seed
        )
    timings["sampling"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    records: list[MetricRecord] = []
    failures: list[CellFailure] = []
    built: dict[str, list[WeightedGraph]] = {}
    for model in config.models:
        try:
            graphs = _build_model_graphs(model, alignment, config)
            built[model] = graphs
        except Exception as exc:
            for method in config.methods:
                failures.append(CellFailure(model, method, "graphs", str(exc)))
            continue
        if profile_only:
            continue
        for method in config.methods:
            try:
                Z = _fused_embedding(graphs, method, config)
                auc, acc, f1 = evaluate_embedding(
                    Z,
                    positives,
                    negatives,
                    train_fraction=config.train_fraction,
                    seed=config.seed,
                    reg_strength=config.reg_strength,
                    tol=config.tol,
                    max_iter=config.max_iter,
                )
            except Exception as exc:
                failures.append(CellFailure(model, method, "evaluate", str(exc)))
                continue
            records.append(
                MetricRecord(config.dataset_name, method, model, auc, acc, f1)
            )
    timings["cells"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rank_table = None
    gain_table = None
    if records:
        done = {(r.model, r.method) for r in records}
        complete = [
            m for m in config.models if all((m, meth) in done for meth in config.methods)
        ]
        ranked = [r for r in records if r.model in complete]
        if complete:
            rank_table = rank_models(ranked)
            ours = [m for m in complete if m != "static"]
            if "static" in complete and ours:
                gain_table = mean_gain(ranked, ours, ["static"])
    timings["tables"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    profiles: dict[str, tuple[tuple[int, int], ...]] = {
        "tau": tuple((s.index, s.n_edges) for s in alignment.tau_full.snapshots),
        "eps": tuple((s.index, s.n_edges) for s in alignment.eps_train.snapshots),
    }
    for model in config.models:
        if model in built:
            profiles[model] = tuple(
                (k + 1, g.n_arcs) for k, g in enumerate(built[model])
            )
    timings["profiles"] = time.perf_counter() - t0

    return ExperimentReport(
        dataset_name=config.dataset_name,
        records=tuple(records),
        failures=tuple(failures),
        rank_table=rank_table,
        gain_table=gain_table,
        profiles=profiles,
        config_echo=config.echo(),
        timings=timings,
        total_seconds=time.perf_counter() - t_start,
        epsilon=alignment.epsilon,
        offset=alignment.offset,
        eps_skipped=alignment.eps_skipped,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def _rank_csv(table: RankTable | None) -> str:
    lines = ["model,auc_firsts,acc_firsts,f1_firsts,score"]
    if table is not None:
        for m in table.models:
            c = table.counts[m]
            lines.append(f"{m},{c['auc']},{c['acc']},{c['f1']},{table.scores[m]}")
    return "\n".join(lines) + "\n"


def _gain_csv(table: GainTable | None) -> str:
    if table is None:
        return "model,mean\n"
    header = "model," + ",".join(table.baselines) + ",mean"
    lines = [header]
    for m in table.models:
        row = ",".join(_fmt(table.values[m][b]) for b in table.baselines)
        lines.append(f"{m},{row},{_fmt(table.means[m])}")
    return "\n".join(lines) + "\n"


def _rank_json(table: RankTable | None):
    if table is None:
        return None
    return {
        "models": list(table.models),
        "criteria": list(table.criteria),
        "counts": table.counts,
        "scores": table.scores,
    }


def _gain_json(table: GainTable | None):
    if table is None:
        return None
    return {
        "models": list(table.models),
        "baselines": list(table.baselines),
        "values": table.values,
        "means": table.means,
    }


def emit_report(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Write the report files; layout and bytes depend only on the report.

    Always: config_echo.json, rank_table.csv, gain_table.csv, and one
    edge_counts_<name>.csv per profile.  Metric records go to metrics.csv
    or, when the config asked for json, to a metrics.json that embeds every
    table.  Timings stay out of the files so reruns are byte-identical.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        target = out / name
        target.write_text(text)
        written.append(target)

    emit(
        "config_echo.json",
        json.dumps(report.config_echo, indent=2, sort_keys=True) + "\n",
    )
    for name, profile in report.profiles.items():
        rows = [f"{idx},{count}" for idx, count in profile]
        emit(f"edge_counts_{name}.csv", "\n".join(["snapshot_index,edge_count"] + rows) + "\n")
    emit("rank_table.csv", _rank_csv(report.rank_table))
    emit("gain_table.csv", _gain_csv(report.gain_table))

    if report.config_echo.get("format") == "json":
        doc = {
            "dataset": report.dataset_name,
            "epsilon": report.epsilon,
            "offset": report.offset,
            "eps_skipped": report.eps_skipped,
            "config": report.config_echo,
            "records": [asdict(r) for r in report.records],
            "failures": [asdict(f) for f in report.failures],
            "rank_table": _rank_json(report.rank_table),
            "gain_table": _gain_json(report.gain_table),
            "profiles": {k: [list(p) for p in v] for k, v in report.profiles.items()},
        }
        emit("metrics.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        lines = ["dataset,method,model,auc,acc,f1"]
        for r in report.records:
            lines.append(
                f"{r.dataset},{r.method},{r.model},{_fmt(r.auc)},{_fmt(r.acc)},{_fmt(r.f1)}"
            )
        emit("metrics.csv", "\n".join(lines) + "\n")
    return written
