"""Command-line entry points: run experiments, generate cost matrices,
and sweep the blending parameter."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .costgen import gen_consistent, gen_inconsistent
from .data import parse_dataset, write_cost_matrix
from .errors import CostblendError
from .harness import (
    CostSource,
    ExperimentConfig,
    emit_report,
    load_config,
    run_emphasis_sweep,
    run_experiment,
    sweep_alpha,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costblend",
        description="Cost-and-error sensitive multiclass classification benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment protocol from a config file")
    run.add_argument("--config", required=True, help="JSON experiment configuration")
    run.add_argument("--threads", type=int, default=1, help="worker pool size")
    run.add_argument("--format", default="table", choices=["table", "csv", "json-like"])
    run.add_argument("--out", default=None, help="write the report here instead of stdout")

    gen = sub.add_parser("gen-cost", help="generate a benchmark cost matrix for a dataset")
    gen.add_argument("--type", required=True, choices=["inconsistent", "consistent"])
    gen.add_argument("--data", required=True, help="dataset file supplying class counts")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="cost matrix output file")

    sweep = sub.add_parser("sweep-alpha", help="per-alpha cost/error series for a soft algorithm")
    sweep.add_argument("--algo", required=True, help="a soft algorithm, e.g. soft-osr")
    sweep.add_argument("--data", required=True, help="dataset file")
    sweep.add_argument("--cost", default="inconsistent",
                       help="inconsistent, consistent, or matrix:<path>")
    sweep.add_argument("--runs", type=int, default=20)
    sweep.add_argument("--folds", type=int, default=5)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--alpha-grid", default=None,
                       help="comma-separated alphas (default 0.0,0.1,...,1.0)")
    sweep.add_argument("--lambda-grid", default=None, help="comma-separated lambda values")
    sweep.add_argument("--threads", type=int, default=1)
    sweep.add_argument("--format", default="table", choices=["table", "csv"])
    sweep.add_argument("--out", default=None)
    return parser


def _write(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_run(args) -> None:
    config = load_config(args.config)
    if config.cost.emphasize_u is not None and len(config.cost.emphasize_u) > 1:
        reports = run_emphasis_sweep(config, threads=args.threads)
        chunks = [emit_report(report, args.format) for _, report in sorted(reports.items())]
        _write("\n".join(chunks), args.out)
        return
    report = run_experiment(config, threads=args.threads)
    _write(emit_report(report, args.format), args.out)


def _cmd_gen_cost(args) -> None:
    dataset = parse_dataset(args.data)
    counts = dataset.class_counts()
    rng = np.random.default_rng(args.seed)
    if args.type == "inconsistent":
        matrix = gen_inconsistent(counts, rng)
    else:
        matrix, _ = gen_consistent(counts, rng)
    write_cost_matrix(args.out, matrix)


def _parse_cost_flag(flag: str) -> CostSource:
    if flag.startswith("matrix:"):
        return CostSource("matrix", path=flag.removeprefix("matrix:"))
    return CostSource(flag)


def _cmd_sweep_alpha(args) -> None:
    alpha_grid = (
        tuple(float(v) for v in args.alpha_grid.split(","))
        if args.alpha_grid
        else ExperimentConfig.__dataclass_fields__["alpha_grid"].default
    )
    lambda_grid = (
        tuple(float(v) for v in args.lambda_grid.split(","))
        if args.lambda_grid
        else ExperimentConfig.__dataclass_fields__["lambda_grid"].default
    )
    config = ExperimentConfig(
        dataset=args.data,
        algorithms=(args.algo,),
        cost=_parse_cost_flag(args.cost),
        runs=args.runs,
        folds=args.folds,
        lambda_grid=lambda_grid,
        alpha_grid=alpha_grid,
        seed=args.seed,
    )
    rows = sweep_alpha(config, args.algo, threads=args.threads)
    if args.format == "csv":
        lines = ["alpha,cost_mean,cost_stderr,error_mean,error_stderr"]
        for alpha, cost, error in rows:
            lines.append(f"{alpha!r},{cost.mean!r},{cost.stderr!r},{error.mean!r},{error.stderr!r}")
        _write("\n".join(lines) + "\n", args.out)
        return
    lines = [f"{'alpha':>6}  {'cost':>22}  {'error':>22}"]
    for alpha, cost, error in rows:
        lines.append(
            f"{alpha:6.2f}  {cost.mean:10.6f} +/- {cost.stderr:8.6f}"
            f"  {error.mean:10.6f} +/- {error.stderr:8.6f}"
        )
    _write("\n".join(lines), args.out)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            _cmd_run(args)
        elif args.command == "gen-cost":
            _cmd_gen_cost(args)
        else:
            _cmd_sweep_alpha(args)
    except (CostblendError, OSError) as exc:
        print(f"costblend: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
