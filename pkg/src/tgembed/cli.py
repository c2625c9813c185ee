"""Command-line entry point.

Two subcommands: ``run`` executes the configured sweep and writes the full
report (tables, profiles, figures); ``profile`` stops after graph
construction and writes only the edge-count profiles and their figures.
Exit codes: 0 full success, 2 when some cells failed but the run finished,
1 on config or dataset errors.
"""

from __future__ import annotations

import argparse
import sys

from .evaluation import EvalError
from .experiment import ConfigError, emit_report, load_config, run_experiment
from .figures import render_report_figures
from .models import ModelError
from .series import PartitionError
from .stream import EdgeStreamError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgembed",
        description="Temporal graph models, embeddings, and link-prediction sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured sweep and write a report")
    run_p.add_argument("--config", required=True, help="YAML or JSON config file")
    run_p.add_argument("--out", help="output directory (overrides the config)")
    run_p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    run_p.add_argument(
        "--format", choices=("csv", "json"), help="metrics format (overrides the config)"
    )

    prof_p = sub.add_parser("profile", help="write only edge-count profiles")
    prof_p.add_argument("--config", required=True, help="YAML or JSON config file")
    prof_p.add_argument("--out", help="output directory (overrides the config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {"out_dir": args.out}
    if args.command == "run":
        overrides["seed"] = args.seed
        overrides["format"] = args.format
    try:
        config = load_config(args.config, **overrides)
        report = run_experiment(config, profile_only=(args.command == "profile"))
    except (ConfigError, EdgeStreamError, EvalError, PartitionError, ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    written = emit_report(report, config.out_dir)
    written += render_report_figures(report, config.out_dir)

    print(f"dataset {report.dataset_name}: epsilon={report.epsilon} offset={report.offset}")
    if report.records:
        print(f"{len(report.records)} metric records")
    for failure in report.failures:
        print(
            f"cell failed: {failure.model}/{failure.method} at {failure.stage}: "
            f"{failure.message}"
        )
    stage_total = sum(report.timings.values())
    stages = " ".join(f"{k}={v:.2f}s" for k, v in report.timings.items())
    print(f"stages: {stages} (sum {stage_total:.2f}s, total {report.total_seconds:.2f}s)")
    print(f"{len(written)} files in {config.out_dir}")
    return 2 if report.failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
