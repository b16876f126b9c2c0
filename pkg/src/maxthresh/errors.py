"""Semantic exceptions raised across the package.

All subclass ValueError so callers can catch broadly, but each names the
contract that was violated: bad data, a parameter outside its domain, a
calibration formula evaluated where it is undefined, or a separation-rate
singularity.
"""

from __future__ import annotations

__all__ = [
    "MaxthreshError",
    "DataError",
    "DomainError",
    "CalibrationError",
    "SingularityError",
]


class MaxthreshError(ValueError):
    """Base class for all errors raised by this package."""


class DataError(MaxthreshError):
    """Input data violates a structural requirement (shape, finiteness, range)."""


class DomainError(MaxthreshError):
    """A parameter lies outside its mathematical domain."""


class CalibrationError(MaxthreshError):
    """A calibration quantity is undefined for the given dimensions."""


class SingularityError(MaxthreshError):
    """A separation-rate formula was evaluated at its singular point."""
