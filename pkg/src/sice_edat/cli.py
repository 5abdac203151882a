"""Command line entry point: ``sice-edat {generate,estimate,benchmark,evaluate}``."""
import argparse
import contextlib
import json
import logging
import os
import sys
from dataclasses import replace

from threadpoolctl import threadpool_limits

from .baseline import BaselineConfig, run_gista
from .benchmark import generate, run_benchmark, write_report
from .config import METHODS, ExperimentSpec, ParseError, load_config, with_estimator
from .estimator import Status, run_sice_edat
from .formats import STFError, read_stf, write_json, write_stf, write_trace
from .metrics import frob_error, support_metrics
from .synthetic import support_pairs

logger = logging.getLogger("sice_edat")


def _common(parser):
    parser.add_argument("--config", help="experiment config file (key = value)")
    parser.add_argument("--seed", type=int, help="run a single seed")
    parser.add_argument("--method", choices=METHODS)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--threads", type=int,
                        help="BLAS thread count (recorded in outputs)")
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--thr0", type=float)
    parser.add_argument("--decay", type=float)
    parser.add_argument("--rho0", type=float)
    parser.add_argument("--iters", type=int)
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sice-edat",
        description="Sparse precision estimation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write synthetic problems as STF files")
    _common(p)
    p = sub.add_parser("estimate", help="estimate a precision matrix from an STF covariance")
    p.add_argument("input", help="empirical covariance in STF")
    _common(p)
    p = sub.add_parser("benchmark", help="generate, estimate and score")
    _common(p)
    p = sub.add_parser("evaluate", help="score an estimate against a ground truth")
    p.add_argument("estimate", help="estimated precision (STF)")
    p.add_argument("truth", help="ground-truth precision (STF)")
    p.add_argument("--zero-tol", type=float, default=0.0)
    _common(p)
    return parser


def _spec_from_args(args):
    spec = load_config(args.config) if args.config else ExperimentSpec()
    spec = with_estimator(spec, lam=args.lam, thr0=args.thr0, decay=args.decay,
                          rho0=args.rho0, max_iters=args.iters)
    if args.method:
        spec = replace(spec, methods=(args.method,))
        if args.method == "gista" and spec.baseline_cfg is None:
            spec = replace(spec, baseline_cfg=BaselineConfig())
    if args.method == "gista" and args.lam is not None:
        spec = replace(spec, baseline_cfg=replace(spec.baseline_cfg, lam=args.lam))
    if args.seed is not None:
        spec = replace(spec, seeds=(args.seed,))
    if args.out:
        spec = replace(spec, output_path=args.out)
    return spec


def cmd_generate(args):
    spec = _spec_from_args(args)
    manifest = generate(spec, spec.output_path)
    print(json.dumps({"out": spec.output_path,
                      "problems": len(manifest["problems"])}))
    return 0


def cmd_estimate(args):
    spec = _spec_from_args(args)
    s_hat = read_stf(args.input)
    method = args.method or spec.methods[0]
    if method == "gista":
        res = run_gista(s_hat, spec.baseline_cfg or BaselineConfig())
    else:
        res = run_sice_edat(s_hat, spec.estimator_cfg)
    out = spec.output_path
    os.makedirs(out, exist_ok=True)
    write_trace(os.path.join(out, "trace.csv"), res.trace)
    summary = {"method": method, "status": res.status.value, "reason": res.reason,
               "iters_run": res.iters_run, "objective": res.objective,
               "threads": args.threads}
    write_json(os.path.join(out, "result.json"), summary)
    if res.status is Status.FAILED:
        print(f"estimation failed: {res.reason}", file=sys.stderr)
        return 1
    write_stf(os.path.join(out, "theta_hat.stf"), res.theta_hat)
    print(json.dumps(summary))
    return 0


def cmd_benchmark(args):
    spec = _spec_from_args(args)
    report = run_benchmark(spec, keep_traces=True)
    report.spec["threads"] = args.threads
    write_report(report, spec.output_path)
    print(json.dumps(report.aggregates(), indent=2))
    return 1 if report.failures else 0


def cmd_evaluate(args):
    est = read_stf(args.estimate)
    truth = read_stf(args.truth)
    m = support_metrics(est, support_pairs(truth), args.zero_tol)
    result = {"tpr": m.tpr, "fpr": m.fpr, "tp": m.tp, "fp": m.fp, "tn": m.tn,
              "fn": m.fn, "frob_error": frob_error(est, truth)}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_json(os.path.join(args.out, "evaluation.json"), result)
    print(json.dumps(result))
    return 0


COMMANDS = {"generate": cmd_generate, "estimate": cmd_estimate,
            "benchmark": cmd_benchmark, "evaluate": cmd_evaluate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    limits = threadpool_limits(args.threads) if args.threads \
        else contextlib.nullcontext()
    try:
        with limits:
            return COMMANDS[args.command](args)
    except (ParseError, STFError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
