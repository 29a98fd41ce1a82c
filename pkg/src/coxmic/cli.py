"""Command-line front end: fit, path, simulate, bench.

All randomness flows through --seed; repeated invocations with the same
flags print identical bytes (timing figures only appear under --details
or inside the JSON report section).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .dataset import load_csv
from .errors import CoxMicError
from .fit import MicConfig, fit_mic
from .inference import FitResult
from .optimize import OptimizerConfig, ZERO_TOL
from .path import path_flatness, path_tsv, scan_a
from .simulate import SimSpec, bench_grid, generate

TABLE_COLUMNS = ["beta0", "gamma", "se.gamma", "z.stat", "p.value",
                 "beta.MIC", "se.beta.MIC"]


def _fmt(value, digits):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NA"
    return f"{value:.{digits}f}"


def render_table(fit: FitResult, digits: int = 4) -> str:
    """Aligned summary table, one row per covariate, NA where undefined."""
    rows = []
    for j, name in enumerate(fit.names):
        rows.append([
            name,
            _fmt(fit.beta0[j], digits),
            _fmt(fit.gamma[j], digits),
            _fmt(fit.se_gamma[j], digits),
            _fmt(fit.z[j], digits),
            _fmt(fit.p_value[j], digits),
            _fmt(fit.beta[j], digits),
            _fmt(fit.se_beta[j], digits),
        ])
    headers = ["", *TABLE_COLUMNS]
    widths = [max(len(r[c]) for r in rows + [headers]) for c in range(len(headers))]
    lines = []
    lines.append("  ".join(h.rjust(w) if i else h.ljust(w)
                           for i, (h, w) in enumerate(zip(headers, widths))))
    for r in rows:
        lines.append("  ".join(v.rjust(w) if i else v.ljust(w)
                               for i, (v, w) in enumerate(zip(r, widths))))
    return "\n".join(lines)


def render_tsv(fit: FitResult, digits: int = 4) -> str:
    lines = ["\t".join(["name", *TABLE_COLUMNS])]
    for j, name in enumerate(fit.names):
        lines.append("\t".join([
            name,
            _fmt(fit.beta0[j], digits), _fmt(fit.gamma[j], digits),
            _fmt(fit.se_gamma[j], digits), _fmt(fit.z[j], digits),
            _fmt(fit.p_value[j], digits), _fmt(fit.beta[j], digits),
            _fmt(fit.se_beta[j], digits),
        ]))
    return "\n".join(lines)


def _nan_to_none(arr):
    return [None if (isinstance(v, float) and math.isnan(v)) else v
            for v in np.asarray(arr, dtype=float).tolist()]


def fit_to_dict(fit: FitResult, digits: int | None = None,
                details: bool = False) -> dict:
    """JSON-ready view of a fit; numbers optionally rounded for display."""

    def vec(arr):
        vals = _nan_to_none(arr)
        if digits is not None:
            vals = [None if v is None else round(v, digits) for v in vals]
        return vals

    out = {
        "names": list(fit.names),
        "beta0": vec(fit.beta0),
        "gamma": vec(fit.gamma),
        "se_gamma": vec(fit.se_gamma),
        "z": vec(fit.z),
        "p_value": vec(fit.p_value),
        "ci_lower": vec(fit.ci_lower),
        "ci_upper": vec(fit.ci_upper),
        "beta": vec(fit.beta),
        "se_beta": vec(fit.se_beta),
        "selected": [bool(b) for b in fit.selected],
        "min_q": fit.min_q,
        "bic": fit.bic,
        "conf_level": fit.conf_level,
        "penalty": {"a": fit.penalty.a, "lambda0": fit.penalty.lambda0},
        "n": fit.n,
        "n_events": fit.n_events,
        "flags": fit.flags,
    }
    if details:
        rep = fit.report
        out["report"] = {
            "restart_index": rep.restart_index,
            "snapped": rep.snapped,
            "global": _stage_dict(rep.global_stage),
            "local": _stage_dict(rep.local_stage),
        }
        out["vcov_gamma"] = fit.vcov_gamma.tolist()
    return out


def _stage_dict(stage):
    return {"iterations": stage.iterations,
            "initial_value": stage.initial_value,
            "final_value": stage.final_value,
            "converged": stage.converged,
            "grad_norm": stage.grad_norm,
            "seconds": stage.seconds}


def plot_data_tsv(fit: FitResult) -> str:
    """Error-bar plot data: (parameter, name, estimate, lower, upper, selected)."""
    lines = ["parameter\tname\testimate\tlower\tupper\tselected"]
    crit = (fit.ci_upper - fit.gamma)  # crit * se_gamma, elementwise
    for j, name in enumerate(fit.names):
        sel = int(fit.beta[j] != 0.0)
        lines.append("\t".join([
            "gamma", name, f"{fit.gamma[j]:.6f}",
            f"{fit.ci_lower[j]:.6f}", f"{fit.ci_upper[j]:.6f}", str(sel)]))
    for j, name in enumerate(fit.names):
        sel = int(fit.beta[j] != 0.0)
        if sel and not math.isnan(fit.se_beta[j]):
            half = crit[j] / fit.se_gamma[j] * fit.se_beta[j] \
                if fit.se_gamma[j] > 0 else float("nan")
            lo, hi = fit.beta[j] - half, fit.beta[j] + half
            lines.append("\t".join(["beta", name, f"{fit.beta[j]:.6f}",
                                    f"{lo:.6f}", f"{hi:.6f}", "1"]))
        else:
            lines.append("\t".join(["beta", name, f"{fit.beta[j]:.6f}",
                                    "NA", "NA", str(sel)]))
    return "\n".join(lines) + "\n"


def parse_recode(text: str):
    """col=from:to,... with * as the default key, e.g. status=2:1,*:0."""
    if "=" not in text:
        raise argparse.ArgumentTypeError(
            f"recode {text!r} must look like col=from:to,from:to")
    col, _, body = text.partition("=")
    mapping = {}
    for pair in body.split(","):
        if ":" not in pair:
            raise argparse.ArgumentTypeError(
                f"recode entry {pair!r} must look like from:to")
        key, _, val = pair.partition(":")
        try:
            mapping[key] = float(val)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(
                f"recode target {val!r} must be numeric") from exc
    return col, mapping


def parse_grid(text: str):
    """Either lo:hi (inclusive integer range) or a comma list of values."""
    if ":" in text:
        lo, _, hi = text.partition(":")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(
                f"grid {text!r} must be int:int") from exc
        if hi_i < lo_i:
            raise argparse.ArgumentTypeError("grid upper end below lower end")
        return list(range(lo_i, hi_i + 1))
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def _add_data_options(sp):
    sp.add_argument("--input", required=True, help="CSV file to load")
    sp.add_argument("--time-col", default="time")
    sp.add_argument("--status-col", default="status")
    sp.add_argument("--drop-cols", default="",
                    help="comma-separated columns to exclude from covariates")
    sp.add_argument("--recode", action="append", type=parse_recode, default=[],
                    metavar="COL=FROM:TO,...",
                    help="value recodes applied before deletion; * is default")


def _add_fit_options(sp):
    sp.add_argument("--start", choices=["mple", "ridge", "zero", "user"],
                    default="mple")
    sp.add_argument("--theta0", type=float, default=1.0,
                    help="ridge tuning parameter (start=ridge)")
    sp.add_argument("--beta0-file",
                    help="file with one starting value per line (start=user)")
    sp.add_argument("--criterion", choices=["bic", "aic", "custom"],
                    default="bic")
    sp.add_argument("--lambda0", type=float,
                    help="penalty weight (criterion=custom)")
    sp.add_argument("--a0", type=float,
                    help="tanh sharpness; default is the event count")
    sp.add_argument("--no-scale", dest="scale", action="store_false",
                    help="skip covariate standardization")
    sp.add_argument("--maxit-global", type=int, default=300)
    sp.add_argument("--maxit-local", type=int, default=100)
    sp.add_argument("--seed", type=int, default=818)
    sp.add_argument("--restarts", type=int, default=1)
    sp.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    sp.add_argument("--conf-level", type=float, default=0.95)
    sp.add_argument("--round-digits", type=int, default=4)
    sp.add_argument("--vcov", choices=["information", "qn-hessian"],
                    default="information")


def _config_from(args) -> MicConfig:
    beta0 = None
    if args.start == "user":
        if not args.beta0_file:
            raise CoxMicError("--start user requires --beta0-file")
        beta0 = np.loadtxt(args.beta0_file, ndmin=1)
    optimizer = OptimizerConfig(
        maxit_global=args.maxit_global, maxit_local=args.maxit_local,
        seed=args.seed, restarts=args.restarts, zero_tol=args.zero_tol)
    return MicConfig(criterion=args.criterion, lambda0=args.lambda0,
                     a=args.a0, start=args.start, theta0=args.theta0,
                     beta0=beta0, scale=args.scale,
                     conf_level=args.conf_level,
                     vcov_method=args.vcov.replace("-", "_"),
                     optimizer=optimizer)


def _load_dataset(args):
    drop = [c for c in args.drop_cols.split(",") if c]
    recodes = {col: mapping for col, mapping in args.recode}
    return load_csv(args.input, time_col=args.time_col,
                    status_col=args.status_col, drop_cols=drop,
                    recodes=recodes or None)


def cmd_fit(args) -> int:
    ds = _stage(args, "load", lambda: _load_dataset(args))
    config = _stage(args, "configure", lambda: _config_from(args))
    fit = _stage(args, "fit", lambda: fit_mic(ds, config))
    digits = args.round_digits
    if args.output == "json":
        payload = fit_to_dict(fit, details=args.details)
        print(json.dumps(payload, indent=2))
    elif args.output == "tsv":
        print(render_tsv(fit, digits))
    else:
        print(render_table(fit, digits))
        print(f"\nmin.Q = {fit.min_q:.{digits}f}   BIC = {fit.bic:.{digits}f}   "
              f"selected {int(fit.selected.sum())} of {len(fit.names)}")
        if args.details:
            rep = fit.report
            print(f"global: {rep.global_stage.iterations} iters, "
                  f"{rep.global_stage.initial_value:.4f} -> "
                  f"{rep.global_stage.final_value:.4f} "
                  f"({rep.global_stage.seconds:.3f}s)")
            print(f"local : {rep.local_stage.iterations} iters, "
                  f"converged={rep.local_stage.converged}, "
                  f"grad={rep.local_stage.grad_norm:.2e} "
                  f"({rep.local_stage.seconds:.3f}s)")
    if args.emit_plot_data:
        with open(args.emit_plot_data, "w") as fh:
            fh.write(plot_data_tsv(fit))
    return 0


def cmd_path(args) -> int:
    ds = _stage(args, "load", lambda: _load_dataset(args))
    config = _stage(args, "configure", lambda: _config_from(args))
    grid = args.a_grid
    if sorted(grid) != list(grid):
        print("note: grid values were not ascending; rows are emitted "
              "in ascending order", file=sys.stderr)
    result = _stage(args, "scan", lambda: scan_a(
        ds, grid, config, jobs=args.jobs, warm_start=args.warm_start))
    tsv = path_tsv(result)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(tsv)
    else:
        sys.stdout.write(tsv)
    flat = path_flatness(result, args.flatness_min)
    print(f"flatness over a >= {flat.a_min:g}: modal support "
          f"{{{', '.join(flat.modal_support)}}} held by "
          f"{100 * flat.stability:.1f}% of {flat.n_points} points; "
          f"max coefficient range "
          f"{max(flat.coef_range.values()):.4f}",
          file=sys.stderr if not args.out else sys.stdout)
    if not result.converged.all():
        bad = [f"{a:g}" for a, c in zip(result.a_grid, result.converged) if not c]
        print(f"note: local stage did not fully converge at a in "
              f"{{{', '.join(bad)}}}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    beta = None
    if args.beta:
        beta = np.asarray([float(v) for v in args.beta.split(",")])
    spec = SimSpec(n=args.n, p=args.p, true_beta=beta, rho=args.rho,
                   target_censoring=args.censoring, seed=args.seed)
    ds = _stage(args, "generate", lambda: generate(spec))
    lines = [",".join(["time", "status", *ds.names])]
    for i in range(ds.n):
        vals = [f"{ds.time[i]:.10g}", f"{int(ds.status[i])}",
                *(f"{v:.10g}" for v in ds.covariates[i])]
        lines.append(",".join(vals))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _default_grid():
    cells = []
    for n in (200, 2000):
        for p in (10, 50, 100):
            for cens in (0.25, 0.40):
                beta = np.zeros(p)
                beta[:5] = (1.0, 1.0, 0.5, 0.5, 0.5)
                cells.append(SimSpec(n=n, p=p, true_beta=beta, rho=0.5,
                                     target_censoring=cens, seed=818))
    return cells


def cmd_bench(args) -> int:
    if args.grid:
        with open(args.grid) as fh:
            raw = json.load(fh)
        specs = []
        for cell in raw:
            beta = cell.get("beta")
            specs.append(SimSpec(
                n=cell["n"], p=cell["p"],
                true_beta=None if beta is None else np.asarray(beta, float),
                rho=cell.get("rho", 0.0),
                target_censoring=cell.get("censoring", 0.25),
                seed=cell.get("seed", 818)))
    else:
        specs = _default_grid()
    methods = [m for m in args.methods.split(",") if m]
    rows = _stage(args, "bench", lambda: bench_grid(
        specs, methods=methods, runs=args.runs))
    meta, cells = rows[0]["meta"], rows[1:]
    if args.output == "json":
        print(json.dumps({"meta": meta, "cells": cells}, indent=2))
    else:
        cols = sorted({k for row in cells for k in row})
        print("\t".join(cols))
        for row in cells:
            print("\t".join(_cell_txt(row.get(c)) for c in cols))
        print(f"# {meta['timing']}; runs={meta['runs']}", file=sys.stderr)
    return 0


def _cell_txt(v):
    if v is None:
        return "NA"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


class _StageFailure(Exception):
    def __init__(self, stage, err):
        super().__init__(str(err))
        self.stage = stage
        self.err = err


def _stage(args, name, thunk):
    try:
        return thunk()
    except CoxMicError as exc:
        raise _StageFailure(name, exc) from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coxmic",
        description="Sparse Cox proportional hazards fits by minimizing a "
                    "smoothed information criterion")
    sub = ap.add_subparsers(dest="command", required=True)

    fit_p = sub.add_parser("fit", help="fit one model and print the "
                                       "coefficient table")
    _add_data_options(fit_p)
    _add_fit_options(fit_p)
    fit_p.add_argument("--output", choices=["table", "tsv", "json"],
                       default="table")
    fit_p.add_argument("--details", action="store_true",
                       help="include optimizer diagnostics")
    fit_p.add_argument("--emit-plot-data", metavar="PATH",
                       help="write error-bar plot data TSV")
    fit_p.set_defaults(func=cmd_fit)

    path_p = sub.add_parser("path", help="coefficient path over the "
                                         "sharpness parameter")
    _add_data_options(path_p)
    _add_fit_options(path_p)
    path_p.add_argument("--a-grid", type=parse_grid, required=True,
                        metavar="LO:HI|V1,V2,...")
    path_p.add_argument("--out", help="TSV output path (stdout if omitted)")
    path_p.add_argument("--flatness-min", type=float, default=50.0)
    path_p.add_argument("--jobs", type=int, default=1)
    path_p.add_argument("--warm-start", action="store_true")
    path_p.set_defaults(func=cmd_path)

    sim_p = sub.add_parser("simulate", help="write a synthetic dataset CSV")
    sim_p.add_argument("--n", type=int, required=True)
    sim_p.add_argument("--p", type=int, required=True)
    sim_p.add_argument("--beta", help="comma-separated true coefficients "
                                      "(default all zero)")
    sim_p.add_argument("--rho", type=float, default=0.0)
    sim_p.add_argument("--censoring", type=float, default=0.25)
    sim_p.add_argument("--seed", type=int, default=818)
    sim_p.add_argument("-o", "--out", help="output CSV (stdout if omitted)")
    sim_p.set_defaults(func=cmd_simulate)

    bench_p = sub.add_parser("bench", help="timing/selection benchmark grid")
    bench_p.add_argument("--grid", help="JSON list of cells "
                                        '[{"n":..,"p":..,"censoring":..}]')
    bench_p.add_argument("--methods", default="mic,mple,stepwise")
    bench_p.add_argument("--runs", type=int, default=3)
    bench_p.add_argument("--output", choices=["tsv", "json"], default="tsv")
    bench_p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _StageFailure as exc:
        print(f"error [{exc.stage}]: {exc.err}", file=sys.stderr)
        return 1
    except CoxMicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
