"""Benchmark test functions f0..f6 (vectorised over x, y arrays)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np

from ..core.domains import PlanePoint
from ..errors import ParameterError


@dataclass(frozen=True)
class TestFunction:
    id: int
    expr: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]

    # Keep pytest from collecting this class.
    __test__ = False

    @property
    def name(self) -> str:
        return f"f{self.id}"

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.asarray(self.fn(x, y), dtype=float)


def _f0(x, y):
    return np.ones(np.broadcast(x, y).shape)


FUNCTIONS: Dict[int, TestFunction] = {
    f.id: f
    for f in (
        TestFunction(0, "1", _f0),
        TestFunction(1, "sin(xy)", lambda x, y: np.sin(x * y)),
        TestFunction(2, "exp(-xy)", lambda x, y: np.exp(-x * y)),
        TestFunction(3, "exp(-(x^2+y^2))", lambda x, y: np.exp(-(x * x + y * y))),
        TestFunction(4, "1/(x^2+y^2+1)", lambda x, y: 1.0 / (x * x + y * y + 1.0)),
        TestFunction(5, "cos(x) sin(y)", lambda x, y: np.cos(x) * np.sin(y)),
        TestFunction(6, "ln(x^2+y^2+1)", lambda x, y: np.log(x * x + y * y + 1.0)),
    )
}


def parse_function_id(value: Union[int, str]) -> int:
    """Accept 2, "2" or "f2"."""

    s = str(value).strip().lower()
    if s.startswith("f"):
        s = s[1:]
    try:
        fid = int(s)
    except ValueError:
        raise ParameterError(f"unknown test function {value!r} (expected 0..6 or f0..f6)") from None
    if fid not in FUNCTIONS:
        raise ParameterError(f"unknown test function {value!r} (expected 0..6 or f0..f6)")
    return fid


def get_function(value: Union[int, str]) -> TestFunction:
    return FUNCTIONS[parse_function_id(value)]


def test_function(fid: Union[int, str], pt: PlanePoint) -> float:
    f = get_function(fid)
    return float(f(pt.x, pt.y))


# Not a pytest test.
test_function.__test__ = False  # type: ignore[attr-defined]
