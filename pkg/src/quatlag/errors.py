"""Exception types raised by quatlag."""

from __future__ import annotations


class QuatlagError(Exception):
    """Base class for every error raised by this package."""


class DegenerateQuaternion(QuatlagError, ValueError):
    """A 4-vector is too close to zero to be normalized, or too far from unit norm."""


class TangencyViolation(QuatlagError, ValueError):
    """A quaternion rate is not tangent to the unit sphere at its base point."""


class ConfigError(QuatlagError, ValueError):
    """A scenario configuration is malformed or inconsistent."""


class NumericalDivergence(QuatlagError, RuntimeError):
    """The closed loop blew up (angular rate beyond the divergence limit).

    ``partial`` carries whatever was recorded before the blow-up.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class EmptyRecords(QuatlagError, ValueError):
    """A metric was requested on an empty record sequence."""


class InsufficientHistory(QuatlagError, ValueError):
    """A windowed statistic was requested on a history shorter than the window."""
