"""Pytest configuration.

Makes ``src/`` importable and provides small shared fixtures. Paper-scale
tests are opt-in: set ORTHOFIT_PAPER_SCALE=1 to run them.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np
import pytest


# Ensure src/ is importable (src layout).
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))


def pytest_collection_modifyitems(config, items):
    if os.getenv("ORTHOFIT_PAPER_SCALE", "").strip() in ("1", "true", "yes", "on"):
        return
    skip = pytest.mark.skip(reason="paper-scale run; set ORTHOFIT_PAPER_SCALE=1")
    for item in items:
        if "paper_scale" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def paper_domains():
    from orthofit.core.domains import DomainSpec

    return {
        "ellipse": DomainSpec.ellipse(1.5, 1.0),
        "annulus": DomainSpec.annulus(1.0, 0.25),
        "polygon": DomainSpec.polygon(12),
    }


@pytest.fixture
def isolated_manifests(tmp_path, monkeypatch):
    """Run CLI commands with manifests written under tmp_path."""

    import orthofit.config as config

    monkeypatch.setattr(config, "MANIFEST_DIR", str(tmp_path))
    monkeypatch.setattr(config, "QUIET", True)
    return tmp_path
