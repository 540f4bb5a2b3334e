"""Command-line entry points: run experiments, compute reference solutions,
print the complexity-bound report, and sanity-check data files."""

import argparse
import dataclasses
import os
import sys

import numpy as np

from .data_io import parse_libsvm
from .errors import AsboxError
from .harness import (bound_report, build_problem, load_config,
                      reference_solution, run_experiment)


def _cmd_run(args):
    cfg = load_config(args.config)
    if args.method:
        cfg = dataclasses.replace(cfg, method=args.method)
    if args.seed:
        cfg = dataclasses.replace(cfg, seeds=tuple(args.seed))
    if args.out:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    for path in run_experiment(cfg):
        print(path)
    return 0


def _cmd_reference(args):
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    path = cfg.reference_path or os.path.join(cfg.out_dir, "reference.npy")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    x = reference_solution(problem, cache_path=path)
    from .geometry import stationarity
    res = stationarity(x, problem.full_grad(x), problem.box)
    print(f"{path} (stationarity {res:.3e})")
    return 0


def _cmd_bound(args):
    cfg = load_config(args.config)
    report = bound_report(cfg)
    for line in report.lines:
        print(line)
    return 0


def _cmd_parse_check(args):
    source = sys.stdin if args.data == "-" else args.data
    dataset = parse_libsvm(source)
    values, counts = np.unique(dataset.labels, return_counts=True)
    histogram = ", ".join(f"{v:g}: {c}" for v, c in zip(values, counts))
    print(f"samples: {dataset.n_samples}")
    print(f"features: {dataset.n_features}")
    print(f"labels: {histogram}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="asbox",
        description="Box-constrained finite-sum experiments with adaptive "
                    "sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment, one CSV per seed")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--method", choices=("asbox", "psgm", "sipm"))
    p_run.add_argument("--seed", type=int, nargs="*")
    p_run.add_argument("--out", help="override the output directory")
    p_run.set_defaults(fn=_cmd_run)

    p_ref = sub.add_parser("reference",
                           help="compute and cache the reference solution")
    p_ref.add_argument("--config", required=True)
    p_ref.set_defaults(fn=_cmd_reference)

    p_bound = sub.add_parser("bound",
                             help="print the expected-iteration bound report")
    p_bound.add_argument("--config", required=True)
    p_bound.set_defaults(fn=_cmd_bound)

    p_check = sub.add_parser("parse-check", help="validate a LIBSVM file")
    p_check.add_argument("--data", required=True,
                         help="path to the file, or - for stdin")
    p_check.set_defaults(fn=_cmd_parse_check)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (AsboxError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
