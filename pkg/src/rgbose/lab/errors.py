"""Exceptions raised by the laboratory modules."""

from typing import Optional


class RGBoseError(Exception):
    """Base class for all rg-bose errors."""


class DomainError(RGBoseError, ValueError):
    """An operation was called outside its domain of validity."""


class ConfigError(RGBoseError):
    """A run configuration failed validation."""


class QuadratureError(RGBoseError):
    """A quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: Optional[float] = None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConvergenceError(RGBoseError):
    """An iterative solver failed to converge."""


class NonContractionError(ConvergenceError):
    """The empirical contraction ratio of a map reached 1."""

    def __init__(self, message: str, ratio: float):
        super().__init__(message)
        self.ratio = ratio
