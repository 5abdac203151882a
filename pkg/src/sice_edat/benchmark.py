"""Experiment runner: generate synthetic problems, run solvers, score them.

Timing wraps the solver call only. Seeds run sequentially and the report is
ordered by method then seed, so reruns produce identical data and traces.
"""
import csv
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baseline import BaselineConfig, run_gista
from .estimator import Status, run_sice_edat
from .formats import format_stf, trace_to_csv, write_json
from .metrics import frob_error, support_metrics
from .synthetic import RngSpec, make_problem

__all__ = [
    "RunReport",
    "problem_for",
    "solve",
    "generate",
    "calibrate_lambda",
    "run_benchmark",
    "write_report",
]

logger = logging.getLogger(__name__)


def problem_for(spec, seed):
    return make_problem(spec.kind, spec.p, spec.n, RngSpec(seed),
                        target_nnz=spec.target_nnz, center=spec.center)


def solve(method, s_hat, spec, lam=None):
    """Run ``method`` on ``s_hat`` with the spec's config (``lam`` overrides)."""
    if method == "sice-edat":
        cfg = spec.estimator_cfg
        if lam is not None:
            cfg = replace(cfg, lam=lam)
        return run_sice_edat(s_hat, cfg)
    if method == "gista":
        cfg = spec.baseline_cfg or BaselineConfig()
        if lam is not None:
            cfg = replace(cfg, lam=lam)
        return run_gista(s_hat, cfg)
    raise ValueError(f"unknown method {method!r}")


def generate(spec, out_dir):
    """Write ``theta_star`` / ``s_hat`` STF files per seed and a manifest.

    Returns the manifest dict.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for seed in spec.seeds:
        prob = problem_for(spec, seed)
        names = {"theta_star": f"theta_star_seed{seed}.stf",
                 "s_hat": f"s_hat_seed{seed}.stf"}
        for key, name in names.items():
            with open(os.path.join(out_dir, name), "w", newline="\n") as fh:
                fh.write(format_stf(getattr(prob, key)))
        entries.append({
            "seed": seed,
            "rng": {"algorithm_name": RngSpec(seed).algorithm_name, "seed": seed},
            "files": names,
            "support_pairs": len(prob.support),
            "achieved_nnz": 2 * len(prob.support) + prob.p,
        })
    manifest = {"kind": spec.kind, "p": spec.p, "n": spec.n,
                "target_nnz": spec.target_nnz, "center": spec.center,
                "problems": entries}
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def calibrate_lambda(spec, method, problems=None):
    """Pick ``lambda`` for ``method`` on the calibration seeds.

    The chosen value maximizes mean TPR among grid points whose mean FPR is
    at most ``spec.calibrate_fpr`` (ties go to the larger lambda). If no
    grid point qualifies the largest lambda is returned.

    Returns
    -------
    lam : float
    table : list of dict
        Mean TPR/FPR per grid point.
    """
    problems = problems or [problem_for(spec, s) for s in spec.calibration_seeds]
    table = []
    for lam in sorted(spec.lambda_grid):
        tprs, fprs = [], []
        for prob in problems:
            res = solve(method, prob.s_hat, spec, lam)
            m = support_metrics(res.theta_hat, prob.support, spec.zero_tol)
            ok = res.status is not Status.FAILED
            tprs.append(m.tpr if ok else 0.0)
            fprs.append(m.fpr if ok else 1.0)
        table.append({"lambda": lam, "tpr": float(np.mean(tprs)),
                      "fpr": float(np.mean(fprs))})
    feasible = [r for r in table if r["fpr"] <= spec.calibrate_fpr]
    if not feasible:
        return max(spec.lambda_grid), table
    best = max(feasible, key=lambda r: (r["tpr"], r["lambda"]))
    return best["lambda"], table


@dataclass
class RunReport:
    spec: dict
    rows: list = field(default_factory=list)
    calibration: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)

    @property
    def failures(self):
        return [r for r in self.rows if r["status"] == Status.FAILED.value]

    def method_rows(self, method):
        return [r for r in self.rows if r["method"] == method]

    def aggregates(self):
        out = {}
        for method in dict.fromkeys(r["method"] for r in self.rows):
            rows = [r for r in self.method_rows(method)
                    if r["status"] != Status.FAILED.value]
            agg = {"seeds": len(self.method_rows(method)),
                   "failures": len(self.method_rows(method)) - len(rows)}
            for key in ("tpr", "fpr", "wall_time_seconds"):
                vals = np.array([r[key] for r in rows], dtype=float)
                agg[f"{key}_mean"] = float(vals.mean()) if len(vals) else math.nan
                agg[f"{key}_std"] = float(vals.std()) if len(vals) else math.nan
            out[method] = agg
        return out

    def to_dict(self):
        return {"spec": self.spec, "rows": self.rows,
                "aggregates": self.aggregates(), "calibration": self.calibration}


REPORT_COLUMNS = ("method", "seed", "lambda", "status", "tpr", "fpr", "tp", "fp",
                  "tn", "fn", "frob_error", "wall_time_seconds", "iters_run",
                  "objective")


def run_benchmark(spec, keep_traces=False):
    """Generate, solve and evaluate every (method, seed) pair of ``spec``.

    Per-seed failures are recorded in the report and do not stop the run.
    """
    report = RunReport(spec=spec.as_dict())
    lambdas = {}
    for method in spec.methods:
        if spec.calibrate_fpr is not None:
            lam, table = calibrate_lambda(spec, method)
            lambdas[method] = lam
            report.calibration[method] = {"lambda": lam, "grid": table}
            logger.info("calibrated %s: lambda=%g", method, lam)
        elif method == "gista":
            lambdas[method] = (spec.baseline_cfg or BaselineConfig()).lam
        else:
            lambdas[method] = spec.estimator_cfg.lam
    problems = {seed: problem_for(spec, seed) for seed in spec.seeds}
    for method in spec.methods:
        for seed in spec.seeds:
            prob = problems[seed]
            t0 = time.perf_counter()
            try:
                res = solve(method, prob.s_hat, spec, lambdas[method])
                error = ""
            except Exception as exc:  # recorded per seed, run continues
                res, error = None, f"{type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - t0
            row = {"method": method, "seed": seed, "lambda": lambdas[method],
                   "wall_time_seconds": elapsed}
            if res is None or res.status is Status.FAILED:
                row.update(status=Status.FAILED.value,
                           reason=error or res.reason,
                           iters_run=res.iters_run if res else 0)
                for key in ("tpr", "fpr", "frob_error", "objective"):
                    row[key] = math.nan
                for key in ("tp", "fp", "tn", "fn"):
                    row[key] = -1
            else:
                m = support_metrics(res.theta_hat, prob.support, spec.zero_tol)
                row.update(status=res.status.value, reason="", tpr=m.tpr,
                           fpr=m.fpr, tp=m.tp, fp=m.fp, tn=m.tn, fn=m.fn,
                           frob_error=frob_error(res.theta_hat, prob.theta_star),
                           iters_run=res.iters_run, objective=res.objective)
            if keep_traces and res is not None:
                report.traces[(method, seed)] = res.trace
            report.rows.append(row)
            logger.info("%s seed=%s status=%s tpr=%.3f fpr=%.4f time=%.2fs",
                        method, seed, row["status"], row["tpr"], row["fpr"],
                        elapsed)
    return report


def write_report(report, out_dir, traces=True):
    """Write ``report.csv``, ``report.json`` and per-run trace CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for row in report.rows:
            w.writerow([row[c] for c in REPORT_COLUMNS])
        w.writerow([])
        w.writerow(("method", "seeds", "failures", "tpr_mean", "tpr_std",
                    "fpr_mean", "fpr_std", "time_mean", "time_std"))
        for method, agg in report.aggregates().items():
            w.writerow((method, agg["seeds"], agg["failures"], agg["tpr_mean"],
                        agg["tpr_std"], agg["fpr_mean"], agg["fpr_std"],
                        agg["wall_time_seconds_mean"],
                        agg["wall_time_seconds_std"]))
    write_json(os.path.join(out_dir, "report.json"), report.to_dict())
    if traces:
        for (method, seed), trace in report.traces.items():
            path = os.path.join(out_dir, f"trace_{method}_seed{seed}.csv")
            with open(path, "w", newline="\n") as fh:
                fh.write(trace_to_csv(trace))
