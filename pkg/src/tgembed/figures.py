"""Figure rendering for experiment reports.

Renders the edge-count profiles, per-model arc-count profiles, and a mean
AUC bar chart as PNG files next to the delimited report output.  Uses the
non-interactive backend so runs work headless.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiment import ExperimentReport


def _plot_profiles(report: ExperimentReport, names: list[str], title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for name in names:
        profile = report.profiles[name]
        ax.plot(
            [idx for idx, _ in profile],
            [count for _, count in profile],
            marker="o",
            markersize=3,
            label=name,
        )
    ax.set_xlabel("snapshot index")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Write the report's figures into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    series_names = [n for n in ("tau", "eps") if n in report.profiles]
    if series_names:
        path = out / "fig_edge_counts.png"
        _plot_profiles(report, series_names, "temporal edges per snapshot", path)
        written.append(path)

    model_names = [n for n in report.profiles if n not in ("tau", "eps")]
    if model_names:
        path = out / "fig_model_arcs.png"
        _plot_profiles(report, model_names, "model arcs per snapshot", path)
        written.append(path)

    if report.records:
        models: list[str] = []
        for r in report.records:
            if r.model not in models:
                models.append(r.model)
        mean_auc = [
            math.fsum(r.auc for r in report.records if r.model == m)
            / sum(1 for r in report.records if r.model == m)
            for m in models
        ]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.bar(range(len(models)), mean_auc)
        ax.set_xticks(range(len(models)))
        ax.set_xticklabels(models, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel("mean AUC")
        ax.set_ylim(0.0, 1.0)
        ax.set_title(f"mean AUC by temporal model ({report.dataset_name})")
        fig.tight_layout()
        path = out / "fig_auc.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
