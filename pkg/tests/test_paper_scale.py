"""Full-size table reproduction at n = 100 (opt-in: ORTHOFIT_PAPER_SCALE=1).

Random samples differ from the published runs, so the checks are
order-of-magnitude rather than digit-for-digit.
"""

from __future__ import annotations

import pytest

from orthofit.bench.experiments import ExperimentConfig, cubature_table, run_experiment
from orthofit.core.domains import DomainSpec


pytestmark = pytest.mark.paper_scale

ELLIPSE = DomainSpec.ellipse(1.5, 1.0)
ANNULUS = DomainSpec.annulus(1.0, 0.25)
POLYGON = DomainSpec.polygon(12)


def _mse(dom: DomainSpec, fid: int, ms, rts):
    cfg = ExperimentConfig.m_sweep(dom, fid, 100, ms, rts)
    rows = run_experiment(cfg, jobs=2)
    assert all(r.ok for r in rows)
    return [r.report.mse for r in rows]


def test_ellipse_f2_m_sweep_converges():
    mse = _mse(ELLIPSE, 2, [5, 10, 15, 20], [7, 13, 18, 24])
    assert all(b < a for a, b in zip(mse, mse[1:]))
    assert mse[-1] <= 1e-12
    assert mse[-1] <= mse[0] * 1e-6


@pytest.mark.parametrize(
    "dom, lo, hi",
    [
        (ANNULUS, 5e-4, 5e-2),
        (POLYGON, 2e-4, 2e-2),
    ],
    ids=["annulus", "polygon"],
)
def test_f2_m20_error_level(dom, lo, hi):
    (mse,) = _mse(dom, 2, [20], [24])
    assert lo <= mse <= hi


@pytest.mark.parametrize(
    "dom, fname, expected, rel",
    [
        (ELLIPSE, "f2", 4.93799, 1e-5),
        (ANNULUS, "f3", 1.79553, 1e-3),
        (POLYGON, "f0", 3.0, 1e-3),
    ],
    ids=["ellipse-f2", "annulus-f3", "polygon-f0"],
)
def test_cubature_of_operator_tables(dom, fname, expected, rel):
    rows = cubature_table(dom, degree=40, m=20, r_tilde=24, n=100, functions=[fname])
    (row,) = rows
    assert row.converged
    assert row.cubature == pytest.approx(expected, rel=rel)
