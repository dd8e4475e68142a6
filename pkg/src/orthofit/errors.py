"""Exception types shared by the orthofit modules.

The CLI maps `NumericalError` subclasses to exit status 2 and every other
`OrthofitError` to exit status 1.
"""

from __future__ import annotations

from typing import Optional


class OrthofitError(Exception):
    pass


class ParameterError(OrthofitError, ValueError):
    """Invalid argument (index parity, negative degree, bad domain parameter...)."""


class ConfigError(OrthofitError):
    """Inconsistent configuration, e.g. a rule and a model on different domains."""


class DomainError(OrthofitError, ValueError):
    """A point lies outside the closed domain (or the closed unit disk)."""

    def __init__(
        self,
        message: str,
        *,
        index: Optional[int] = None,
        preimage_radius: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.index = index
        self.preimage_radius = preimage_radius


class InsufficientSampleError(OrthofitError):
    """The sample has fewer points than the number of interpolation nodes."""


class NumericalError(OrthofitError):
    pass


class DegenerateConstraintsError(NumericalError):
    """rank(C) < M, or R11 singular to working precision."""


class DegenerateDesignError(NumericalError):
    """rank(M) < R~."""


class CubatureError(OrthofitError):
    """Integrand evaluation failed at a cubature node."""

    def __init__(self, message: str, *, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class ReferenceIntegralError(OrthofitError):
    pass
