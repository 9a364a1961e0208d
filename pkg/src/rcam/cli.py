"""Command line interface: ``rcam eval | bench | inspect``.

Exit codes: 0 success, 2 bad flags, 3 unreadable data, 4 degenerate dataset.
"""

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .data import DatasetError, DegenerateDatasetError, find_entry, load_entry, load_manifest
from .ensemble import EnsembleProblem, build_memories, classifier_similarity, classify_batch
from .evaluation import (METHODS, EvalConfig, benchmark_report, canonical_method,
                         cross_validate, outer_plan, prepare_fold, summarize)
from .memory import RecallConfig, make_activation

EXIT_USAGE, EXIT_UNREADABLE, EXIT_DEGENERATE = 2, 3, 4


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("alpha grid needs positive values")
    return values


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _config(args):
    grid = args.alpha_grid or EvalConfig.__dataclass_fields__["alpha_grid"].default
    return EvalConfig(outer_folds=args.folds, inner_folds=args.inner_folds,
                      alpha_grid=tuple(grid), n_trees=args.trees, seed=args.seed,
                      alpha=args.alpha)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", default="data/manifest.json", type=Path,
                        help="JSON list of {name, path, label_column, positive_class}")
    common.add_argument("--alpha", type=float, default=1.0, help="exponential gain")
    common.add_argument("--alpha-grid", type=_float_list, default=None,
                        help="candidate gains for grid search, comma separated")
    common.add_argument("--trees", type=_positive_int, default=30)
    common.add_argument("--folds", type=int, default=10)
    common.add_argument("--inner-folds", type=int, default=5)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=_positive_int, default=1)
    common.add_argument("--out", type=Path, default=Path("results"))

    parser = argparse.ArgumentParser(prog="rcam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="cross-validate one method on one dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=METHODS, default="exp_rcam")

    p = sub.add_parser("bench", parents=[common], help="all datasets x methods report")
    p.add_argument("--methods", default=",".join(METHODS),
                   help="comma-separated subset of " + ", ".join(METHODS))
    p.add_argument("--datasets", default=None, help="comma-separated subset of manifest names")

    p = sub.add_parser("inspect", parents=[common], help="dump one fold's recall dynamics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--method", choices=("identity_rcam", "exp_rcam"), default="exp_rcam")
    return parser


def _check_common(parser, args):
    if args.folds < 2 or args.inner_folds < 2:
        parser.error("--folds and --inner-folds must be >= 2")
    if args.alpha <= 0:
        parser.error("--alpha must be positive")
    if args.seed < 0:
        parser.error("--seed must be non-negative")


def cmd_eval(args):
    entry = find_entry(load_manifest(args.manifest), args.dataset)
    dataset = load_entry(entry)
    results = cross_validate(dataset, args.method, _config(args), n_jobs=args.jobs)
    mean, std = summarize(results)[args.method]
    records = [r.to_record() for r in results]
    out = args.out / f"eval_{dataset.name}_{args.method}_seed{args.seed}.json"
    write_atomic(out, json.dumps(records, indent=2) + "\n")
    print(f"{dataset.name} {args.method}: F1 {100 * mean:.1f}±{100 * std:.1f}")
    return 0


def cmd_bench(args, parser):
    try:
        methods = [canonical_method(m.strip()) for m in args.methods.split(",") if m.strip()]
    except ValueError as exc:
        parser.error(str(exc))
    entries = load_manifest(args.manifest)
    if args.datasets:
        entries = [find_entry(entries, name.strip()) for name in args.datasets.split(",")]
    config = _config(args)
    results, failures = [], []
    for entry in entries:
        try:
            results.extend(cross_validate(load_entry(entry), methods, config, n_jobs=args.jobs))
        except DatasetError as exc:
            failures.append({"dataset": entry.name, "error": str(exc)})
            print(f"warning: {entry.name}: {exc}", file=sys.stderr)
    report = benchmark_report(results, failures)
    records = [r.to_record() for r in results]
    write_atomic(args.out / "results.json", json.dumps(records, indent=2) + "\n")
    write_atomic(args.out / "report.json", report.to_json())
    write_atomic(args.out / "report.csv", report.to_csv())
    write_atomic(args.out / "timings.csv", report.timing_csv())
    sys.stdout.write(report.to_csv())
    if entries and not report.datasets:
        return EXIT_UNREADABLE
    return 0


def cmd_inspect(args, parser):
    dataset = load_entry(find_entry(load_manifest(args.manifest), args.dataset))
    config = _config(args)
    if not 0 <= args.fold < config.outer_folds:
        parser.error(f"--fold must be in [0, {config.outer_folds - 1}]")
    data = prepare_fold(dataset, outer_plan(dataset, config), args.fold, config)
    f = make_activation(args.method, args.alpha)
    problem = EnsembleProblem(data.train_targets, data.train_outputs, data.test_outputs)
    memories = build_memories(problem)
    pred = classify_batch(problem, f, RecallConfig())

    print(f"dataset {dataset.name}, fold {args.fold}/{config.outer_folds}, "
          f"activation {args.method}" + (f" alpha={args.alpha:g}" if args.method == "exp_rcam" else ""))
    print(f"M={problem.n_train} L={problem.n_batch} P={memories.shape[0]}")
    print(f"iterations {pred.iterations}, converged {pred.converged}")
    print("changed per iteration: " + " ".join(str(c) for c in pred.changes))
    zeros = int(np.count_nonzero(pred.recalled_state == 0))
    print(f"{'k':>3} {'weight':>14} {'similarity':>11} {'residual':>10}")
    for k, (w, u) in enumerate(zip(pred.weights, memories)):
        if zeros:
            sim, res = "n/a", "n/a"
        else:
            s = classifier_similarity(pred.recalled_state, u)
            sim, res = f"{s:.6f}", f"{abs(w - f(2 * s - 1)):.2e}"
        print(f"{k:>3} {w:>14.8g} {sim:>11} {res:>10}")
    if zeros:
        print(f"note: fixed point has {zeros} zero entries; similarity and residuals not defined")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_common(parser, args)
    try:
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "bench":
            return cmd_bench(args, parser)
        return cmd_inspect(args, parser)
    except DegenerateDatasetError as exc:
        print(f"error: degenerate dataset: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE


if __name__ == "__main__":
    sys.exit(main())
