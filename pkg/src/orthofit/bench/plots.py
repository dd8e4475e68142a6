"""Static SVG plots (matplotlib Figure API, no pyplot state, no display)."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from ..errors import ParameterError


_METRICS = (
    ("mse", "MSE", "o"),
    ("max_ae", "MaxAE", "s"),
    ("mre", "MRE", "^"),
    ("max_re", "MaxRE", "D"),
)


def _save(fig: Figure, dest: Union[str, Path]) -> Path:
    """Byte-stable SVG: fixed id salt, no date stamp."""

    out = Path(dest)
    with matplotlib.rc_context({"svg.hashsalt": "orthofit"}):
        fig.savefig(out, format="svg", metadata={"Date": None})
    return out


def plot_errors(frame: pd.DataFrame, dest: Union[str, Path], *, title: str = "", xcol: Optional[str] = None) -> Path:
    """Four error curves against m (or rtilde) on a log scale."""

    if xcol is None:
        xcol = "m" if "m" in frame.columns else "rtilde"
    if xcol not in frame.columns:
        raise ParameterError(f"sweep table has no {xcol!r} column")
    if "repeat" in frame.columns:
        frame = frame.groupby(xcol, as_index=False).median(numeric_only=True)

    fig = Figure(figsize=(5.5, 4.0))
    ax = fig.add_subplot(1, 1, 1)
    x = pd.to_numeric(frame[xcol], errors="coerce").to_numpy()
    for col, label, marker in _METRICS:
        if col not in frame.columns:
            continue
        y = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=float)
        ok = np.isfinite(y) & (y > 0)
        if np.any(ok):
            ax.semilogy(x[ok], y[ok], marker=marker, label=label)
    ax.set_xlabel("m" if xcol == "m" else "r~")
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()

    return _save(fig, dest)


def plot_nodes(
    sample: np.ndarray,
    dest: Union[str, Path],
    *,
    optimal: Optional[np.ndarray] = None,
    mock: Optional[np.ndarray] = None,
    title: str = "",
) -> Path:
    """Sample points with OCS and mock-optimal nodes overlaid."""

    fig = Figure(figsize=(5.0, 5.0))
    ax = fig.add_subplot(1, 1, 1)
    pts = np.asarray(sample, dtype=float).reshape(-1, 2)
    ax.scatter(pts[:, 0], pts[:, 1], s=4, c="tab:green", alpha=0.5, label="sample")
    if optimal is not None:
        o = np.asarray(optimal, dtype=float).reshape(-1, 2)
        ax.scatter(o[:, 0], o[:, 1], s=18, marker="s", facecolors="none", edgecolors="tab:pink", label="OCS")
    if mock is not None:
        k = np.asarray(mock, dtype=float).reshape(-1, 2)
        ax.scatter(k[:, 0], k[:, 1], s=10, c="tab:blue", label="mock-optimal")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()

    return _save(fig, dest)
