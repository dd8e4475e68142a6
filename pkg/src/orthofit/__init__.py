"""orthofit

Interpolation-regression approximation on the ellipse, the circular annulus
and the regular polygon, using Zernike polynomials transported from the unit
disk, plus cubature rules built the same way.

Entry point: `orthofit` (console script) or `python -m orthofit`.
"""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

__all__ = ["__version__"]

try:
    __version__ = version("orthofit")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
