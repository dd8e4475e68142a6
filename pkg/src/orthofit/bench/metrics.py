"""Error metrics over a test set."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from .. import config
from ..errors import ParameterError


@dataclass(frozen=True)
class ErrorReport:
    mse: float
    max_ae: float
    mre: float
    max_re: float
    ex_time: float
    test_count: int
    skipped_rel: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def error_metrics(truth, approx, ex_time: float = 0.0, *, rel_guard: Optional[float] = None) -> ErrorReport:
    """MSE, MaxAE, MRE, MaxRE; relative terms skip |truth| < rel_guard."""

    t = np.asarray(truth, dtype=float).reshape(-1)
    a = np.asarray(approx, dtype=float).reshape(-1)
    if t.size != a.size:
        raise ParameterError(f"length mismatch: {t.size} truth values vs {a.size} approximations")
    if t.size == 0:
        raise ParameterError("error metrics need at least one test point")

    guard = float(getattr(config, "REL_GUARD", 1e-14) if rel_guard is None else rel_guard)
    diff = np.abs(a - t)
    keep = np.abs(t) >= guard
    if np.any(keep):
        rel = diff[keep] / np.abs(t[keep])
        mre, max_re = float(np.mean(rel)), float(np.max(rel))
    else:
        mre = max_re = float("nan")

    return ErrorReport(
        mse=float(np.mean(diff * diff)),
        max_ae=float(np.max(diff)),
        mre=mre,
        max_re=max_re,
        ex_time=max(float(ex_time), 0.0),
        test_count=int(t.size),
        skipped_rel=int(t.size - np.count_nonzero(keep)),
    )
