from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from orthofit.bench.plots import plot_errors, plot_nodes
from orthofit.core.domains import DomainSpec
from orthofit.core.sampling import mock_optimal_select, optimal_nodes, uniform_sample
from orthofit.errors import ParameterError


def _frame(with_repeat: bool = False) -> pd.DataFrame:
    rows = []
    for rep in range(2 if with_repeat else 1):
        for m, mse in ((5, 1e-3), (10, 1e-7), (15, float("nan"))):
            rows.append({"m": m, "mse": mse * (1 + rep), "max_ae": 10 * mse, "mre": mse, "max_re": 0.0, "repeat": rep})
    frame = pd.DataFrame(rows)
    return frame if with_repeat else frame.drop(columns=["repeat"])


def test_plot_errors_writes_svg(tmp_path):
    out = plot_errors(_frame(), tmp_path / "errs.svg", title="ellipse f2")
    text = out.read_text(encoding="utf-8")
    assert "<svg" in text


def test_plot_errors_with_repeats_and_rtilde_axis(tmp_path):
    out = plot_errors(_frame(with_repeat=True), tmp_path / "rep.svg")
    assert out.exists()
    frame = pd.DataFrame({"rtilde": [9, 14], "mse": [1e-3, 1e-5]})
    assert plot_errors(frame, tmp_path / "rt.svg").exists()


def test_plot_errors_svg_is_reproducible(tmp_path):
    a = plot_errors(_frame(), tmp_path / "a.svg").read_text(encoding="utf-8")
    b = plot_errors(_frame(), tmp_path / "b.svg").read_text(encoding="utf-8")
    assert a == b


def test_plot_errors_missing_column(tmp_path):
    with pytest.raises(ParameterError):
        plot_errors(pd.DataFrame({"mse": [1.0]}), tmp_path / "x.svg", xcol="m")


def test_plot_nodes(tmp_path):
    dom = DomainSpec.polygon(12)
    sample = uniform_sample(dom, 15, 2)
    opt = optimal_nodes(dom, 5)
    mock = mock_optimal_select(sample, opt, m=5)
    out = plot_nodes(sample.points, tmp_path / "nodes.svg", optimal=opt, mock=mock.points, title="nodes")
    assert "<svg" in out.read_text(encoding="utf-8")
    assert plot_nodes(np.zeros((3, 2)), tmp_path / "bare.svg").exists()
