#!/usr/bin/env python3
# app.py

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import config
from .bench.experiments import (
    ExperimentConfig,
    cubature_table,
    default_m_values,
    resolve_preset,
    rows_frame,
    run_experiment,
    summarize_best,
    write_cubature_csv,
    write_csv,
    write_sweep_csv,
)
from .bench.functions import get_function, parse_function_id
from .bench.metrics import error_metrics
from .bench.plots import plot_errors, plot_nodes
from .core.cubature import integrate, integrate_operator, rule_for_domain
from .core.diagnostics import Diagnostics
from .core.domains import DomainSpec
from .core.sampling import (
    SampleSet,
    mock_optimal_select,
    ocs_nodes_disk,
    optimal_nodes,
    polar_grid_sample,
    uniform_points,
    uniform_sample,
)
from .core.solver import OperatorModel, evaluate_operator, fit_sample, norm_bound
from .core.textio import format_float, header_domain, read_points, render_points, write_points
from .errors import NumericalError, OrthofitError, ParameterError
from .ui import console as ui


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; 2 is for numerical failures."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class _Run:
    command: str
    args: Dict[str, Any]
    quiet: bool = False
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    outputs: List[str] = field(default_factory=list)
    seeds: Dict[str, int] = field(default_factory=dict)

    def log(self, msg: str) -> None:
        if not self.quiet:
            ui.log(msg)
        # Mirror into the manifest diagnostics.
        src = "orthofit"
        if msg.startswith("[") and "]" in msg:
            src = msg[1 : msg.index("]")]
        level = "warn" if "warning" in msg else "info"
        self.diagnostics.log(msg, level=level, source=src)

    def emit(self, dest: Optional[str], text: str) -> None:
        """Write command output to a file (recorded) or stdout."""

        if dest and dest != "-":
            Path(dest).write_text(text, encoding="utf-8")
            self.outputs.append(str(Path(dest)))
        else:
            sys.stdout.write(text)
            sys.stdout.flush()


# -----------------------------------------------------------------------------
# Argument parsing
# -----------------------------------------------------------------------------


def _version_string() -> str:
    try:
        from .build_info import get_version_with_revision

        return f"orthofit {get_version_with_revision()}"
    except Exception:
        return "orthofit unknown"


def _int_list(text: str) -> List[int]:
    parts = [p for p in str(text).replace(",", " ").split() if p]
    try:
        return [int(p, 0) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quiet", action="store_true", default=None, help="Silence progress logs (default: ORTHOFIT_QUIET)")
    p.add_argument(
        "--manifest",
        default=None,
        help="Run manifest path (default: <ORTHOFIT_MANIFEST_DIR>/orthofit-<command>-manifest.json)",
    )


def _add_domain(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument(
        "--domain",
        required=required,
        help='Domain as JSON, e.g. \'{"tag":"polygon","p":12}\', or @file.json',
    )


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orthofit", description="Mapped-Zernike interpolation-regression and cubature")
    p.add_argument("--version", action="version", version=_version_string())
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("nodes", help="OCS interpolation nodes of degree m on a domain")
    _add_domain(s)
    s.add_argument("--m", type=int, required=True, help="Interpolation degree m")
    s.add_argument("--out", default=None, help="Output file (default: stdout)")
    _add_common(s)

    s = sub.add_parser("sample", help="Scattered sample of (n+1)^2 points")
    _add_domain(s)
    s.add_argument("--n", type=int, required=True, help="Grid parameter n (N = (n+1)^2)")
    s.add_argument("--seed", type=int, default=None, help="RNG seed (default: ORTHOFIT_SEED)")
    s.add_argument("--layout", choices=("uniform", "grid"), default="uniform", help="i.i.d. uniform or structured polar grid")
    s.add_argument("--function", default=None, help="Attach values of test function f0..f6 as a third column")
    s.add_argument("--out", default=None, help="Output file (default: stdout)")
    _add_common(s)

    s = sub.add_parser("fit", help="Fit the interpolation-regression operator and write model JSON")
    _add_domain(s, required=False)
    s.add_argument("--m", type=int, required=True, help="Interpolation degree m")
    s.add_argument("--rtilde", type=int, required=True, help="Regression degree rtilde (>= m)")
    s.add_argument("--sample", default=None, help="Sample file (x y [value]); default: draw --n/--seed")
    s.add_argument("--n", type=int, default=None, help="Grid parameter when drawing a sample (default: ORTHOFIT_DESK_N)")
    s.add_argument("--seed", type=int, default=None, help="Seed when drawing a sample (default: ORTHOFIT_SEED)")
    s.add_argument(
        "--function",
        default=None,
        help="Test function id (0..6 / f0..f6) or a file of values (one per line); default: sample's third column",
    )
    s.add_argument("--variant", default=None, help="Basis variant: plain | jacobian_weighted")
    s.add_argument("--normalization", choices=("paper", "unit"), default=None, help="Zernike normalization")
    s.add_argument("--norm-bound", action="store_true", help="Also compute the operator norm bound")
    s.add_argument("--out", default=None, help="Model JSON path (default: stdout)")
    _add_common(s)

    s = sub.add_parser("eval", help="Evaluate a fitted model")
    s.add_argument("--model", required=True, help="Model JSON written by 'orthofit fit'")
    s.add_argument("--points", default=None, help="Points file; prints x y value")
    s.add_argument("--function", default=None, help="Score against f0..f6 on a fresh uniform test set")
    s.add_argument("--test-points", type=int, default=None, help="Test set size (default: ORTHOFIT_TEST_POINTS)")
    s.add_argument("--seed", type=int, default=None, help="Test set seed (default: ORTHOFIT_TEST_SEED)")
    s.add_argument("--out", default=None, help="Output file (default: stdout)")
    _add_common(s)

    s = sub.add_parser("cubature", help="Cubature rules and integrals")
    _add_domain(s, required=False)
    s.add_argument("--degree", type=int, default=None, help="Exactness degree q (default: ORTHOFIT_CUBATURE_DEGREE)")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--function", default=None, help="Integrate test function f0..f6")
    g.add_argument("--model", default=None, help="Integrate a fitted model")
    g.add_argument("--table", action="store_true", help="Cubature-of-operator table for f0..f6 (CSV)")
    s.add_argument("--weight-spec", choices=("none",), default="none", help="Weight function (only 'none')")
    s.add_argument("--rule-out", default=None, help="Write the rule as 'x y w' lines")
    s.add_argument("--m", type=int, default=20, help="Table: interpolation degree (default 20)")
    s.add_argument("--rtilde", type=int, default=24, help="Table: regression degree (default 24)")
    s.add_argument("--n", type=int, default=None, help="Table: grid parameter (default: desk n)")
    s.add_argument("--paper-scale", action="store_true", help="Table: use n = ORTHOFIT_PAPER_N")
    s.add_argument("--seed", type=int, default=None, help="Table: sample seed (default: ORTHOFIT_SEED)")
    s.add_argument("--out", default=None, help="Table CSV path (default: stdout)")
    _add_common(s)

    s = sub.add_parser("bench", help="Error sweeps over m or rtilde (CSV)")
    _add_domain(s, required=False)
    s.add_argument("--preset", default=None, help="paper-f<0..6>-<ellipse|annulus|polygon>")
    s.add_argument("--function", default=None, help="Test function f0..f6 (with --domain)")
    s.add_argument("--sweep", choices=("m", "rtilde"), default="m", help="Sweep kind (default: m)")
    s.add_argument("--n", type=int, default=None, help="Grid parameter (default: ORTHOFIT_DESK_N)")
    s.add_argument("--paper-scale", action="store_true", help="Use n = ORTHOFIT_PAPER_N and the long m list")
    s.add_argument("--m", type=_int_list, default=None, help="m values ('5,10,15'); one value for --sweep rtilde")
    s.add_argument("--rtilde", type=_int_list, default=None, help="rtilde values (default: m + floor(sqrt m))")
    s.add_argument("--test-points", type=int, default=None, help="Test set size (default: ORTHOFIT_TEST_POINTS)")
    s.add_argument("--seed", type=int, default=None, help="Sample seed (default: ORTHOFIT_SEED)")
    s.add_argument("--test-seed", type=int, default=None, help="Test set seed (default: ORTHOFIT_TEST_SEED)")
    s.add_argument("--variant", default=None, help="Basis variant: plain | jacobian_weighted")
    s.add_argument("--jobs", type=int, default=None, help="Worker threads for sweep rows (default: ORTHOFIT_JOBS)")
    s.add_argument("--repeat", type=int, default=1, help="Repeat with consecutive seeds; adds a 'repeat' column")
    s.add_argument("--plot", default=None, help="Also write an SVG error plot")
    s.add_argument("--best", nargs="+", default=None, metavar="CSV", help="Summarise best MSE over sweep CSVs and exit")
    s.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_common(s)

    s = sub.add_parser("plot", help="SVG plots of sweep CSVs or node layouts")
    s.add_argument("--csv", default=None, help="Sweep CSV to plot")
    s.add_argument("--nodes", action="store_true", help="Plot sample, OCS and mock-optimal nodes")
    _add_domain(s, required=False)
    s.add_argument("--m", type=int, default=10, help="Nodes plot: degree m (default 10)")
    s.add_argument("--n", type=int, default=40, help="Nodes plot: grid parameter (default 40)")
    s.add_argument("--seed", type=int, default=None, help="Nodes plot: sample seed (default: ORTHOFIT_SEED)")
    s.add_argument("--title", default="", help="Plot title")
    s.add_argument("--out", required=True, help="SVG path")
    _add_common(s)

    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(list(argv) if argv is not None else None)


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _seed(value: Optional[int], name: str = "DEFAULT_SEED") -> int:
    return int(value if value is not None else getattr(config, name, 0))


def _domain(args: argparse.Namespace, fallback: Optional[DomainSpec] = None) -> DomainSpec:
    if getattr(args, "domain", None):
        return DomainSpec.from_text(args.domain)
    if fallback is not None:
        return fallback
    raise ParameterError("--domain is required")


def _load_model(path: str) -> OperatorModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParameterError(f"cannot read model {path}: {e}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParameterError(f"model {path} is not valid JSON: {e}") from None
    return OperatorModel.from_dict(obj)


def _values_from(spec: str, sample: SampleSet) -> np.ndarray:
    try:
        f = get_function(parse_function_id(spec))
    except ParameterError:
        path = Path(spec)
        if not path.exists():
            raise
        try:
            arr = np.loadtxt(path, comments="#", ndmin=2)
        except ValueError as e:
            raise ParameterError(f"cannot parse values file {path}: {e}") from None
        return arr[:, -1]
    return f(sample.points[:, 0], sample.points[:, 1])


def _header(dom: DomainSpec, **kw: Any) -> Dict[str, Any]:
    h: Dict[str, Any] = {"domain": dom}
    h.update({k: v for k, v in kw.items() if v is not None})
    return h


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def cmd_nodes(args: argparse.Namespace, run: _Run) -> int:
    dom = _domain(args)
    ocs = ocs_nodes_disk(args.m)
    pts = optimal_nodes(dom, args.m)
    run.log(f"[nodes] {dom.label} m={args.m}: K={ocs.K} rings, M={ocs.M} nodes")
    run.emit(args.out, render_points(pts, header=_header(dom, m=args.m, M=ocs.M)))
    return 0


def cmd_sample(args: argparse.Namespace, run: _Run) -> int:
    dom = _domain(args)
    if args.layout == "grid":
        sample = polar_grid_sample(dom, args.n)
    else:
        seed = _seed(args.seed)
        run.seeds["sample"] = seed
        sample = uniform_sample(dom, args.n, seed)
    values = None
    if args.function is not None:
        values = get_function(args.function)(sample.points[:, 0], sample.points[:, 1])
    run.log(f"[sample] {dom.label} n={sample.n} N={sample.N} layout={sample.layout}")
    header = _header(dom, n=sample.n, N=sample.N, seed=sample.seed, layout=sample.layout)
    if args.function is not None:
        header["function"] = get_function(args.function).name
    run.emit(args.out, render_points(sample.points, values, header=header))
    return 0


def cmd_fit(args: argparse.Namespace, run: _Run) -> int:
    if args.sample:
        pts, third, header = read_points(args.sample)
        dom = _domain(args, header_domain(header))
        n = int(header["n"]) if header.get("n", "").isdigit() else int(round(np.sqrt(pts.shape[0]))) - 1
        seed = int(header["seed"]) if header.get("seed", "").lstrip("-").isdigit() else None
        sample = SampleSet(domain=dom, n=n, seed=seed, points=pts, values=third)
    else:
        dom = _domain(args)
        n = int(args.n if args.n is not None else getattr(config, "DESK_N", 40))
        seed = _seed(args.seed)
        run.seeds["sample"] = seed
        sample = uniform_sample(dom, n, seed)

    if args.function is not None:
        sample = sample.with_values(_values_from(args.function, sample))
    if sample.values is None:
        raise ParameterError("no function values: pass --function or a sample file with a third column")

    sys_, model = fit_sample(
        dom,
        sample,
        args.m,
        args.rtilde,
        variant=args.variant,
        normalization=args.normalization,
        log_fn=run.log,
    )
    for w in model.diagnostics.get("warnings", []):
        run.diagnostics.warn(w, source="fit")
    if args.norm_bound:
        rep = norm_bound(sys_, model)
        model.diagnostics["norm_bound"] = rep.to_dict()
        run.log(f"[fit] norm bound {rep.bound:.4g} (K1={rep.K1:.4g}, K2={rep.K2:.4g}, sup={rep.sup_estimate:.4g})")
    run.emit(args.out, json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_eval(args: argparse.Namespace, run: _Run) -> int:
    model = _load_model(args.model)
    if args.points:
        pts, _, _ = read_points(args.points)
        ev = evaluate_operator(model, pts)
        run.log(f"[eval] {pts.shape[0]} points in {ev.seconds:.4f}s")
        run.emit(args.out, render_points(pts, ev.values, header=_header(model.domain, model=args.model)))
        return 0
    if args.function is None:
        raise ParameterError("eval needs --points or --function")
    f = get_function(args.function)
    count = int(args.test_points if args.test_points is not None else getattr(config, "TEST_POINTS", 5000))
    seed = _seed(args.seed, "TEST_SEED")
    run.seeds["test"] = seed
    pts = uniform_points(model.domain, count, np.random.default_rng(seed))
    ev = evaluate_operator(model, pts)
    rep = error_metrics(f(pts[:, 0], pts[:, 1]), ev.values, ev.seconds)
    if not run.quiet:
        ui.render_table(
            f"{model.domain.label} {f.name} m={model.m} rtilde={model.r_tilde}",
            ["metric", "value"],
            [("MSE", rep.mse), ("MaxAE", rep.max_ae), ("MRE", rep.mre), ("MaxRE", rep.max_re), ("ExTime", rep.ex_time)],
        )
    run.emit(args.out, json.dumps(rep.to_dict(), sort_keys=True) + "\n")
    return 0


def cmd_cubature(args: argparse.Namespace, run: _Run) -> int:
    q = int(args.degree if args.degree is not None else getattr(config, "CUBATURE_DEGREE", 40))

    if args.table:
        dom = _domain(args)
        if args.n is not None:
            n = args.n
        else:
            n = int(getattr(config, "PAPER_N" if args.paper_scale else "DESK_N", 40))
        seed = _seed(args.seed)
        run.seeds["sample"] = seed
        rows = cubature_table(dom, degree=q, m=args.m, r_tilde=args.rtilde, n=n, seed=seed, log_fn=run.log)
        for r in rows:
            if not r.converged:
                run.diagnostics.warn(f"reference integral of {r.function} did not converge", source="cubature")
        if not run.quiet:
            ui.render_table(
                f"cubature on {dom.label} (q={q}, m={args.m}, rtilde={args.rtilde}, n={n})",
                ["f", "actual", "cubature", "sq_error", "rel_error"],
                [(r.function, r.actual, r.cubature, r.sq_error, "-" if r.rel_error is None else r.rel_error) for r in rows],
            )
        run.emit(args.out, write_cubature_csv(rows))
        return 0

    if args.model:
        model = _load_model(args.model)
        if args.domain and DomainSpec.from_text(args.domain) != model.domain:
            raise ParameterError("--domain does not match the model's domain")
        dom = model.domain
    else:
        dom = _domain(args)
    rule = rule_for_domain(dom, q)
    run.log(f"[cubature] {dom.label} q={q}: {rule.size} nodes ({rule.n_radial} x {rule.n_angular}), space={rule.exactness_space}")
    if args.rule_out:
        write_points(args.rule_out, rule.nodes, rule.weights, header=_header(dom, degree=q, space=rule.exactness_space))
        run.outputs.append(str(Path(args.rule_out)))

    if args.model:
        value = integrate_operator(rule, model)
    elif args.function is not None:
        value = integrate(rule, get_function(args.function))
    elif args.rule_out:
        return 0
    else:
        raise ParameterError("cubature needs --function, --model, --table or --rule-out")
    run.emit(args.out, format_float(value) + "\n")
    return 0


def cmd_bench(args: argparse.Namespace, run: _Run) -> int:
    if args.best:
        best = summarize_best(args.best)
        if not run.quiet:
            ui.render_table(
                "best MSE per domain and function",
                ["domain", "function", "mse", "m", "rtilde"],
                best.itertuples(index=False),
            )
        run.emit(args.out, write_csv(best, None))
        return 0

    if args.preset:
        dom, fid = resolve_preset(args.preset)
        if args.domain:
            dom = DomainSpec.from_text(args.domain)
        if args.function is not None:
            fid = parse_function_id(args.function)
    else:
        dom = _domain(args)
        if args.function is None:
            raise ParameterError("bench needs --preset or --function")
        fid = parse_function_id(args.function)

    if args.n is not None:
        n = args.n
    else:
        n = int(getattr(config, "PAPER_N" if args.paper_scale else "DESK_N", 40))
    kw: Dict[str, Any] = dict(
        sample_seed=_seed(args.seed),
        test_seed=_seed(args.test_seed, "TEST_SEED"),
        variant=args.variant,
        repeat=max(1, int(args.repeat)),
    )
    if args.test_points is not None:
        kw["test_points"] = int(args.test_points)

    if args.sweep == "m":
        ms = args.m or list(default_m_values(args.paper_scale))
        cfg = ExperimentConfig.m_sweep(dom, fid, n, ms, args.rtilde, **kw)
    else:
        if args.m and len(args.m) != 1:
            raise ParameterError("--sweep rtilde takes a single --m")
        cfg = ExperimentConfig.rtilde_sweep(dom, fid, n, args.rtilde, m=args.m[0] if args.m else None, **kw)
    run.args["experiment"] = cfg.to_dict()
    run.seeds["sample"] = cfg.sample_seed
    run.seeds["test"] = cfg.test_seed

    rows = run_experiment(cfg, jobs=args.jobs, log_fn=run.log, diagnostics=run.diagnostics)
    text = write_sweep_csv(rows, cfg)
    if not run.quiet:
        ui.render_table(
            f"{dom.label} f{fid} ({cfg.sweep}-sweep, n={n})",
            ["m", "rtilde", "M", "Rtilde", "MSE", "MaxAE", "MRE", "MaxRE", "ExTime"],
            [
                (r.m, r.r_tilde, r.M, r.R)
                + ((r.report.mse, r.report.max_ae, r.report.mre, r.report.max_re, r.report.ex_time) if r.report else ("failed",) * 5)
                for r in rows
            ],
        )
    run.emit(args.out, text)
    if args.plot:
        plot_errors(rows_frame(rows, cfg.sweep, with_repeat=cfg.repeat > 1), args.plot, title=f"{dom.label} f{fid}")
        run.outputs.append(str(Path(args.plot)))

    failed = [r for r in rows if not r.ok]
    if failed and len(failed) == len(rows):
        ui.error(f"all {len(rows)} sweep rows failed; see manifest diagnostics")
        return 2
    return 0


def cmd_plot(args: argparse.Namespace, run: _Run) -> int:
    if args.nodes:
        dom = _domain(args)
        seed = _seed(args.seed)
        run.seeds["sample"] = seed
        sample = uniform_sample(dom, args.n, seed)
        opt = optimal_nodes(dom, args.m)
        mock = mock_optimal_select(sample, opt, m=args.m, log_fn=run.log)
        plot_nodes(sample.points, args.out, optimal=opt, mock=mock.points, title=args.title)
    elif args.csv:
        import pandas as pd

        try:
            frame = pd.read_csv(args.csv)
        except (OSError, ValueError) as e:
            raise ParameterError(f"cannot read {args.csv}: {e}") from None
        plot_errors(frame, args.out, title=args.title)
    else:
        raise ParameterError("plot needs --csv or --nodes")
    run.outputs.append(str(Path(args.out)))
    return 0


_HANDLERS = {
    "nodes": cmd_nodes,
    "sample": cmd_sample,
    "fit": cmd_fit,
    "eval": cmd_eval,
    "cubature": cmd_cubature,
    "bench": cmd_bench,
    "plot": cmd_plot,
}


# -----------------------------------------------------------------------------
# Manifest
# -----------------------------------------------------------------------------


def _manifest_path(run: _Run, explicit: Optional[str]) -> Path:
    if explicit:
        return Path(explicit)
    base = Path(str(getattr(config, "MANIFEST_DIR", ".") or "."))
    return base / f"orthofit-{run.command}-manifest.json"


def write_manifest(run: _Run, path: Path, status: int, started: float) -> None:
    from .build_info import build_record, get_version_with_revision

    doc = {
        "command": run.command,
        "config": run.args,
        "settings": {
            "ZERNIKE_NORM": getattr(config, "ZERNIKE_NORM", "paper"),
            "DOMAIN_TOL": getattr(config, "DOMAIN_TOL", 1e-10),
            "RHO_CLAMP_TOL": getattr(config, "RHO_CLAMP_TOL", 1e-12),
            "COND_WARN": getattr(config, "COND_WARN", 1e12),
            "REL_GUARD": getattr(config, "REL_GUARD", 1e-14),
            "ANNULUS_VARIANT": getattr(config, "ANNULUS_VARIANT", "plain"),
            "POLYGON_VARIANT": getattr(config, "POLYGON_VARIANT", "plain"),
        },
        "seeds": dict(run.seeds),
        "outputs": list(run.outputs),
        "tool_version": get_version_with_revision(),
        "build": build_record(getattr(config, "BUILD_TAG", "dev")),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "elapsed_s": round(time.monotonic() - started, 6),
        "exit_status": int(status),
        "diagnostics": run.diagnostics.snapshot(),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


# -----------------------------------------------------------------------------
# Entry point
# -----------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) if not isinstance(e.code, str) else 1

    quiet = bool(args.quiet) if args.quiet is not None else bool(getattr(config, "QUIET", False))
    recorded = {k: v for k, v in vars(args).items() if k not in ("quiet", "manifest")}
    run = _Run(command=args.command, args=recorded, quiet=quiet)
    started = time.monotonic()

    status = 0
    try:
        status = _HANDLERS[args.command](args, run)
    except NumericalError as e:
        run.diagnostics.mark_error(args.command, e)
        ui.error(f"{type(e).__name__}: {e}")
        status = 2
    except (OrthofitError, OSError) as e:
        run.diagnostics.mark_error(args.command, e)
        ui.error(str(e))
        status = 1

    try:
        write_manifest(run, _manifest_path(run, args.manifest), status, started)
    except OSError as e:
        ui.error(f"cannot write manifest: {e}")
        status = status or 1
    return status


if __name__ == "__main__":
    raise SystemExit(main())
