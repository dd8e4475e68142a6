"""Sweep experiments, reference integrals and cubature tables.

A sweep draws one scattered sample per repeat, then for every (m, rtilde)
entry selects mock-optimal nodes, fits the operator and scores it on a
separate uniform test set. Rows are independent and may run on a thread pool;
output order always follows the sweep order.
"""

from __future__ import annotations

import math
import re
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate

from .. import config
from ..core.cubature import integrate_operator, rule_for_domain
from ..core.diagnostics import Diagnostics, row_key
from ..core.domains import DomainSpec, r_alpha
from ..core.sampling import interpolation_size, mock_optimal_select, optimal_nodes, uniform_points, uniform_sample
from ..core.solver import build_design, evaluate_operator, fit, fit_sample
from ..core.zernike import basis_size
from ..errors import OrthofitError, ParameterError, ReferenceIntegralError
from .functions import FUNCTIONS, get_function, parse_function_id
from .metrics import ErrorReport, error_metrics


LogFn = Optional[Callable[[str], None]]

M_SWEEP_COLUMNS = ["m", "rtilde", "M", "Rtilde", "mse", "max_ae", "mre", "max_re", "ex_time", "skipped_rel"]
RTILDE_SWEEP_COLUMNS = ["rtilde", "Rtilde", "mse", "max_ae", "mre", "max_re", "ex_time", "skipped_rel"]
CUBATURE_COLUMNS = ["function", "actual", "est_error", "cubature", "ex_time", "sq_error", "rel_error"]

FLOAT_FORMAT = "%.12g"


# -----------------------------------------------------------------------------
# Presets
# -----------------------------------------------------------------------------

PRESET_DOMAINS: Dict[str, DomainSpec] = {
    "ellipse": DomainSpec.ellipse(1.5, 1.0),
    "annulus": DomainSpec.annulus(1.0, 0.25),
    "polygon": DomainSpec.polygon(12),
}

_PRESET_RE = re.compile(r"^paper-f([0-6])-(ellipse|annulus|polygon)$")


def preset_names() -> List[str]:
    return [f"paper-f{k}-{d}" for d in PRESET_DOMAINS for k in sorted(FUNCTIONS)]


def resolve_preset(name: str) -> Tuple[DomainSpec, int]:
    mt = _PRESET_RE.match(str(name or "").strip().lower())
    if not mt:
        raise ParameterError(f"unknown preset {name!r} (expected paper-f<0..6>-<ellipse|annulus|polygon>)")
    return PRESET_DOMAINS[mt.group(2)], int(mt.group(1))


def default_m_values(paper_scale: bool = False) -> Tuple[int, ...]:
    if paper_scale:
        return tuple(range(5, 50, 5))
    return (5, 10, 15, 20)


def rtilde_for(m: int) -> int:
    """Default regression degree m + floor(sqrt(m))."""

    return int(m) + math.isqrt(int(m))


def default_rtilde_values(m: int, n: int, count: int = 7) -> Tuple[int, ...]:
    N = (n + 1) ** 2
    out = []
    rt = m + 5
    while len(out) < count and basis_size(rt) < N:
        out.append(rt)
        rt += 5
    return tuple(out)


# -----------------------------------------------------------------------------
# Config / rows
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    domain: DomainSpec
    function: int
    n: int
    sweep: str = "m"  # "m" | "rtilde"
    m_values: Tuple[int, ...] = ()
    m_fixed: Optional[int] = None
    rtilde_values: Tuple[int, ...] = ()
    test_points: int = 5000
    sample_seed: int = 0
    test_seed: int = 0
    variant: Optional[str] = None
    normalization: Optional[str] = None
    repeat: int = 1

    @classmethod
    def m_sweep(
        cls,
        domain: DomainSpec,
        function: Union[int, str],
        n: int,
        m_values: Sequence[int],
        rtilde_values: Optional[Sequence[int]] = None,
        **kw: Any,
    ) -> "ExperimentConfig":
        ms = tuple(int(m) for m in m_values)
        rts = tuple(int(r) for r in rtilde_values) if rtilde_values else tuple(rtilde_for(m) for m in ms)
        if len(rts) != len(ms):
            raise ParameterError("m and rtilde lists must have the same length")
        return cls._build(domain=domain, function=function, n=n, sweep="m", m_values=ms, rtilde_values=rts, **kw)

    @classmethod
    def rtilde_sweep(
        cls,
        domain: DomainSpec,
        function: Union[int, str],
        n: int,
        rtilde_values: Optional[Sequence[int]] = None,
        m: Optional[int] = None,
        **kw: Any,
    ) -> "ExperimentConfig":
        mf = int(n) // 5 if m is None else int(m)
        rts = tuple(int(r) for r in rtilde_values) if rtilde_values else default_rtilde_values(mf, int(n))
        return cls._build(domain=domain, function=function, n=n, sweep="rtilde", m_fixed=mf, rtilde_values=rts, **kw)

    @classmethod
    def _build(cls, **kw: Any) -> "ExperimentConfig":
        kw["function"] = parse_function_id(kw["function"])
        kw["n"] = int(kw["n"])
        kw.setdefault("test_points", int(getattr(config, "TEST_POINTS", 5000)))
        kw.setdefault("sample_seed", int(getattr(config, "DEFAULT_SEED", 0)))
        kw.setdefault("test_seed", int(getattr(config, "TEST_SEED", 0)))
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def entries(self) -> List[Tuple[int, int]]:
        if self.sweep == "m":
            return list(zip(self.m_values, self.rtilde_values))
        return [(int(self.m_fixed or 0), rt) for rt in self.rtilde_values]

    def validate(self) -> None:
        if self.sweep not in ("m", "rtilde"):
            raise ParameterError(f"unknown sweep kind {self.sweep!r}")
        if self.n < 0:
            raise ParameterError("n must be >= 0")
        if self.test_points < 1:
            raise ParameterError("test_points must be >= 1")
        if self.repeat < 1:
            raise ParameterError("repeat must be >= 1")
        entries = self.entries()
        if not entries:
            raise ParameterError("sweep has no entries")
        N = (self.n + 1) ** 2
        for m, rt in entries:
            if m < 0 or rt <= m:
                raise ParameterError(f"sweep entry needs 0 <= m < rtilde (m={m}, rtilde={rt})")
            if basis_size(rt) >= N:
                raise ParameterError(f"sweep entry rtilde={rt} needs R~={basis_size(rt)} < N={N}; increase n")

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["domain"] = self.domain.to_dict()
        d["m_values"] = list(self.m_values)
        d["rtilde_values"] = list(self.rtilde_values)
        return d


@dataclass(frozen=True)
class ExperimentRow:
    repeat: int
    seed: int
    m: int
    r_tilde: int
    M: int
    R: int
    N: int
    report: Optional[ErrorReport] = None
    error: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.report is not None


def _run_row(
    cfg: ExperimentConfig,
    sample,
    test_pts: np.ndarray,
    truth: np.ndarray,
    m: int,
    rt: int,
    rep: int,
    log_fn: LogFn,
    diagnostics: Optional[Diagnostics],
) -> ExperimentRow:
    key = row_key(m, rt)
    base = dict(repeat=rep, seed=int(sample.seed), m=m, r_tilde=rt, M=interpolation_size(m), R=basis_size(rt), N=sample.N)
    try:
        _, model = fit_sample(
            cfg.domain,
            sample,
            m,
            rt,
            variant=cfg.variant,
            normalization=cfg.normalization,
            log_fn=log_fn,
        )
        ev = evaluate_operator(model, test_pts)
        report = error_metrics(truth, ev.values, ev.seconds)
    except (OrthofitError, np.linalg.LinAlgError) as e:
        if diagnostics is not None:
            diagnostics.mark_error(key, e, where=f"repeat {rep}")
        if log_fn is not None:
            log_fn(f"[bench] {key} failed: {type(e).__name__}: {e}")
        return ExperimentRow(error=f"{type(e).__name__}: {e}", **base)

    diag = {k: model.diagnostics.get(k) for k in ("cond_R11", "cond_V1tV1", "constraint_residual", "max_mock_distance")}
    if diagnostics is not None:
        diagnostics.mark_ok(key, mse=report.mse)
        for w in model.diagnostics.get("warnings", []):
            diagnostics.warn(w, source=key)
    if log_fn is not None:
        log_fn(f"[bench] {key} mse={report.mse:.3e} max_ae={report.max_ae:.3e} t={report.ex_time:.3f}s")
    return ExperimentRow(report=report, diagnostics=diag, **base)


def run_experiment(
    cfg: ExperimentConfig,
    *,
    jobs: Optional[int] = None,
    log_fn: LogFn = None,
    diagnostics: Optional[Diagnostics] = None,
) -> List[ExperimentRow]:
    """Run every sweep entry (times ``cfg.repeat``); failures become rows with ``error`` set."""

    cfg.validate()
    f = get_function(cfg.function)
    workers = max(1, int(jobs if jobs is not None else getattr(config, "JOBS", 1)))

    test_pts = uniform_points(cfg.domain, cfg.test_points, np.random.default_rng(cfg.test_seed))
    truth = f(test_pts[:, 0], test_pts[:, 1])

    rows: List[ExperimentRow] = []
    for rep in range(cfg.repeat):
        seed = int(cfg.sample_seed) + rep
        sample = uniform_sample(cfg.domain, cfg.n, seed).evaluate(f)
        if log_fn is not None:
            log_fn(f"[bench] {cfg.domain.label} {f.name} n={cfg.n} N={sample.N} seed={seed}")
        tasks = cfg.entries()

        def one(entry: Tuple[int, int]) -> ExperimentRow:
            return _run_row(cfg, sample, test_pts, truth, entry[0], entry[1], rep, log_fn, diagnostics)

        if workers == 1 or len(tasks) == 1:
            rows.extend(one(t) for t in tasks)
        else:
            with ThreadPoolExecutor(max_workers=min(workers, len(tasks))) as ex:
                rows.extend(ex.map(one, tasks))
    return rows


# -----------------------------------------------------------------------------
# CSV
# -----------------------------------------------------------------------------


def rows_frame(rows: Iterable[ExperimentRow], sweep: str = "m", *, with_repeat: bool = False) -> pd.DataFrame:
    records = []
    for r in rows:
        rep = r.report
        rec: Dict[str, Any] = {
            "m": r.m,
            "rtilde": r.r_tilde,
            "M": r.M,
            "Rtilde": r.R,
            "mse": rep.mse if rep else float("nan"),
            "max_ae": rep.max_ae if rep else float("nan"),
            "mre": rep.mre if rep else float("nan"),
            "max_re": rep.max_re if rep else float("nan"),
            "ex_time": rep.ex_time if rep else float("nan"),
            "skipped_rel": rep.skipped_rel if rep else -1,
        }
        if with_repeat:
            rec["repeat"] = r.repeat
        records.append(rec)
    cols = list(M_SWEEP_COLUMNS if sweep == "m" else RTILDE_SWEEP_COLUMNS)
    if with_repeat:
        cols.append("repeat")
    return pd.DataFrame.from_records(records, columns=cols)


def write_csv(frame: pd.DataFrame, dest) -> str:
    """Write with a fixed float format; returns the CSV text."""

    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")
    return text


def write_sweep_csv(rows: Sequence[ExperimentRow], cfg: ExperimentConfig, dest=None) -> str:
    return write_csv(rows_frame(rows, cfg.sweep, with_repeat=cfg.repeat > 1), dest)


def sweep_filename(cfg: ExperimentConfig) -> str:
    return f"{cfg.domain.label}_f{cfg.function}_{cfg.sweep}-sweep.csv"


_SWEEP_NAME_RE = re.compile(r"^(?P<domain>[a-z]+\d*)_f(?P<fid>[0-6])_(?P<sweep>m|rtilde)-sweep$")


def summarize_best(paths: Iterable[Union[str, Path]]) -> pd.DataFrame:
    """Lowest-MSE row per (domain, function) across sweep CSVs.

    File names must follow ``sweep_filename``. The m column of rtilde sweeps
    is not stored, so it is reported as missing for those rows.
    """

    frames = []
    for p in paths:
        path = Path(p)
        mt = _SWEEP_NAME_RE.match(path.stem)
        if not mt:
            raise ParameterError(f"{path.name}: not a sweep CSV name (<domain>_f<k>_<m|rtilde>-sweep.csv)")
        df = pd.read_csv(path)
        if "m" not in df.columns:
            df["m"] = pd.NA
        df["domain"] = mt.group("domain")
        df["function"] = f"f{mt.group('fid')}"
        frames.append(df[["domain", "function", "m", "rtilde", "mse"]])
    if not frames:
        return pd.DataFrame(columns=["domain", "function", "mse", "m", "rtilde"])
    all_rows = pd.concat(frames, ignore_index=True)
    all_rows["mse"] = pd.to_numeric(all_rows["mse"], errors="coerce")
    all_rows = all_rows.dropna(subset=["mse"])
    best = all_rows.loc[all_rows.groupby(["domain", "function"])["mse"].idxmin()]
    return best[["domain", "function", "mse", "m", "rtilde"]].sort_values(["domain", "function"]).reset_index(drop=True)


# -----------------------------------------------------------------------------
# Reference integrals
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceIntegral:
    value: float
    est_error: float
    converged: bool


def reference_integral(dom: DomainSpec, fid: Union[int, str], *, epsabs: Optional[float] = None, epsrel: Optional[float] = None) -> ReferenceIntegral:
    """Adaptive dblquad over the domain in polar (or disk) coordinates."""

    f = get_function(fid)
    ea = float(getattr(config, "REFERENCE_EPSABS", 1e-10) if epsabs is None else epsabs)
    er = float(getattr(config, "REFERENCE_EPSREL", 1e-10) if epsrel is None else epsrel)
    two_pi = 2.0 * math.pi

    def polar(r: float, t: float) -> float:
        return float(f(r * math.cos(t), r * math.sin(t))) * r

    pieces: List[Tuple[Callable[[float, float], float], float, float, Any, Any]] = []
    if dom.tag == "ellipse":
        ca, sa = math.cos(dom.alpha_rot), math.sin(dom.alpha_rot)
        jac = dom.A * dom.B

        def on_disk(r: float, t: float) -> float:
            u, v = dom.A * r * math.cos(t), dom.B * r * math.sin(t)
            return float(f(u * ca - v * sa, u * sa + v * ca)) * r * jac

        pieces.append((on_disk, 0.0, two_pi, 0.0, 1.0))
    elif dom.tag == "annulus":
        pieces.append((polar, 0.0, two_pi, dom.inner_radius, dom.A))
    elif dom.tag == "polygon":
        alpha = dom.alpha
        for k in range(dom.p):
            lo, hi = (2 * k - 1) * alpha, (2 * k + 1) * alpha
            pieces.append((polar, lo, hi, 0.0, lambda t: float(r_alpha(dom.p, t))))
    else:
        pieces.append((polar, 0.0, two_pi, 0.0, 1.0))

    total = 0.0
    err = 0.0
    converged = True
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        for fn, a, b, g, h in pieces:
            val, e = integrate.dblquad(fn, a, b, g, h, epsabs=ea, epsrel=er)
            total += val
            err += e
        if any(issubclass(w.category, integrate.IntegrationWarning) for w in caught):
            converged = False
    if not math.isfinite(total):
        raise ReferenceIntegralError(f"reference integral of {f.name} on {dom.label} is not finite")
    return ReferenceIntegral(value=total, est_error=err, converged=converged)


# -----------------------------------------------------------------------------
# Cubature table
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CubatureRow:
    function: str
    actual: float
    est_error: float
    cubature: float
    ex_time: float
    sq_error: float
    rel_error: Optional[float]
    converged: bool = True


def cubature_table(
    dom: DomainSpec,
    *,
    degree: Optional[int] = None,
    m: int = 20,
    r_tilde: int = 24,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    functions: Sequence[Union[int, str]] = tuple(range(7)),
    variant: Optional[str] = None,
    log_fn: LogFn = None,
    zero_guard: float = 1e-12,
) -> List[CubatureRow]:
    """Integrate each operator fit with the degree-q mapped rule and compare with dblquad.

    One sample and one design matrix are shared by all functions; only the
    right-hand side changes.
    """

    q = int(degree if degree is not None else getattr(config, "CUBATURE_DEGREE", 40))
    n_ = int(n if n is not None else getattr(config, "DESK_N", 40))
    sd = int(seed if seed is not None else getattr(config, "DEFAULT_SEED", 0))
    rule = rule_for_domain(dom, q)

    sample = uniform_sample(dom, n_, sd)
    fids = [parse_function_id(k) for k in functions]
    if not fids:
        return []
    first = sample.evaluate(get_function(fids[0]))
    mock = mock_optimal_select(first, optimal_nodes(dom, m), m=m, log_fn=log_fn)
    base = build_design(dom, variant, r_tilde, first, mock)

    out: List[CubatureRow] = []
    for fid in fids:
        f = get_function(fid)
        vals = f(sample.points[:, 0], sample.points[:, 1])
        sys = replace(base, b=np.asarray(vals, dtype=float)[base.order])
        model = fit(sys, log_fn=log_fn)
        t0 = time.perf_counter()
        approx = integrate_operator(rule, model)
        dt = time.perf_counter() - t0
        ref = reference_integral(dom, fid)
        sq = (approx - ref.value) ** 2
        rel = abs(approx - ref.value) / abs(ref.value) if abs(ref.value) >= zero_guard else None
        if log_fn is not None:
            log_fn(f"[cubature] {dom.label} {f.name}: actual={ref.value:.8g} cubature={approx:.8g}")
        out.append(
            CubatureRow(
                function=f.name,
                actual=ref.value,
                est_error=ref.est_error,
                cubature=approx,
                ex_time=dt,
                sq_error=sq,
                rel_error=rel,
                converged=ref.converged,
            )
        )
    return out


def cubature_frame(rows: Iterable[CubatureRow]) -> pd.DataFrame:
    records = []
    for r in rows:
        records.append(
            {
                "function": r.function,
                "actual": r.actual,
                "est_error": r.est_error,
                "cubature": r.cubature,
                "ex_time": r.ex_time,
                "sq_error": r.sq_error,
                "rel_error": "-" if r.rel_error is None else FLOAT_FORMAT % r.rel_error,
            }
        )
    return pd.DataFrame.from_records(records, columns=CUBATURE_COLUMNS)


def write_cubature_csv(rows: Sequence[CubatureRow], dest=None) -> str:
    return write_csv(cubature_frame(rows), dest)
