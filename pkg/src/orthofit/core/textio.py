"""Plain-text point files.

One point per line, ``x y`` or ``x y w`` (weight or function value), with
``#`` header lines of the form ``# key: value``. The ``domain`` header holds
the domain JSON. Floats are written with 17 significant digits so files
round-trip exactly.
"""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import IO, Any, Dict, Optional, Tuple, Union

import numpy as np

from ..errors import ParameterError
from .domains import DomainSpec


PathOrStream = Union[str, Path, IO[str]]

FLOAT_FMT = "%.17g"


def format_float(v: float) -> str:
    return FLOAT_FMT % float(v)


def _header_text(header: Optional[Dict[str, Any]]) -> str:
    lines = []
    for k, v in (header or {}).items():
        if isinstance(v, DomainSpec):
            v = v.to_json()
        elif isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def write_points(
    dest: PathOrStream,
    points: np.ndarray,
    third: Optional[np.ndarray] = None,
    *,
    header: Optional[Dict[str, Any]] = None,
) -> None:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if third is not None:
        col = np.asarray(third, dtype=float).reshape(-1)
        if col.size != pts.shape[0]:
            raise ParameterError("third column length does not match the point count")
        pts = np.column_stack([pts, col])
    if not hasattr(dest, "write"):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            np.savetxt(fh, pts, fmt=FLOAT_FMT, header=_header_text(header), comments="# ")
        return
    np.savetxt(dest, pts, fmt=FLOAT_FMT, header=_header_text(header), comments="# ")


def render_points(
    points: np.ndarray,
    third: Optional[np.ndarray] = None,
    *,
    header: Optional[Dict[str, Any]] = None,
) -> str:
    buf = io.StringIO()
    write_points(buf, points, third, header=header)
    return buf.getvalue()


def _scan_header(text: str) -> Tuple[Dict[str, str], bool]:
    """``# key: value`` lines, and whether any data line follows."""

    header: Dict[str, str] = {}
    has_data = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                k, v = body.split(":", 1)
                header[k.strip()] = v.strip()
            continue
        has_data = True
    return header, has_data


def parse_points(text: str) -> Tuple[np.ndarray, Optional[np.ndarray], Dict[str, str]]:
    header, has_data = _scan_header(text)
    if not has_data:
        return np.empty((0, 2)), None, header
    try:
        arr = np.loadtxt(io.StringIO(text), comments="#", ndmin=2, dtype=float)
    except ValueError as e:
        raise ParameterError(f"malformed point data: {e}") from None
    if arr.shape[1] not in (2, 3):
        raise ParameterError(f"expected 2 or 3 columns, got {arr.shape[1]}")
    third = arr[:, 2].copy() if arr.shape[1] == 3 else None
    return arr[:, :2].copy(), third, header


def read_points(path: Union[str, Path]) -> Tuple[np.ndarray, Optional[np.ndarray], Dict[str, str]]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ParameterError(f"cannot read {p}: {e}") from None
    return parse_points(text)


def header_domain(header: Dict[str, str]) -> Optional[DomainSpec]:
    raw = header.get("domain")
    return DomainSpec.from_text(raw) if raw else None
