from __future__ import annotations

import sys

import numpy as np


def test_cond_diag_prints_table(monkeypatch, capsys):
    import orthofit.tools.cond_diag as cond_diag

    monkeypatch.setattr(sys, "argv", ["orthofit-cond-diag", "--m", "1:4", "--trials", "2"])

    rc = cond_diag.main()
    out = capsys.readouterr().out

    assert rc == 0
    assert "=== orthofit conditioning diagnostics ===" in out
    assert len([ln for ln in out.splitlines() if ln.strip() and ln.split()[0].isdigit()]) == 4


def test_cond_rows_on_polygon():
    from orthofit.core.domains import DomainSpec
    from orthofit.tools.cond_diag import cond_rows

    rows = cond_rows(DomainSpec.polygon(12), [2, 6], seed=1, trials=3)
    assert [r["M"] for r in rows] == [6, 28]
    for r in rows:
        assert np.isfinite(r["ocs"]) and r["ocs"] >= 1.0
        assert r["random_max"] >= r["random_median"]


def test_cond_diag_bad_arguments(capsys):
    import orthofit.tools.cond_diag as cond_diag

    assert cond_diag.main(["--m", "a:b"]) == 1
    assert cond_diag.main(["--domain", "{bad"]) == 1
    assert cond_diag.main(["--m", " "]) == 1
    assert "No degrees requested." in capsys.readouterr().out
