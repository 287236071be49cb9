"""Exception hierarchy shared by all cavoptics modules."""

from __future__ import annotations


class CavopticsError(Exception):
    """Base class for all library-specific errors."""


class ConstraintViolation(CavopticsError, ValueError):
    """A physical or contract constraint was violated (bad parameters, bad call)."""


class ConfigError(CavopticsError):
    """Scenario configuration file is missing, unreadable or inconsistent."""


class DomainError(CavopticsError, ValueError):
    """Evaluation requested outside the computable domain."""


class NumericError(CavopticsError, RuntimeError):
    """A numerical procedure failed to converge.

    Carries whatever partial results were available so callers can report
    diagnostics instead of a bare failure.
    """

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ClassificationError(CavopticsError):
    """A candidate orbit failed the periodicity residual test."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
