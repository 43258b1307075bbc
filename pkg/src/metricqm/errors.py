"""Exception hierarchy shared by every metricqm module."""

from __future__ import annotations


class MetricQMError(ValueError):
    """Base class. ``value`` carries the offending quantity when there is one."""

    def __init__(self, message: str, value: float | None = None):
        super().__init__(message)
        self.value = value


class DimensionMismatch(MetricQMError):
    pass


class NotHermitian(MetricQMError):
    pass


class NotPositiveDefinite(MetricQMError):
    pass


class NegativeEigenvalue(MetricQMError):
    pass


class ConvergenceError(MetricQMError):
    pass


class ZeroVector(MetricQMError):
    pass


class NormalizationError(MetricQMError):
    """A state or density operator does not satisfy its tagged normalization."""


class TraceConditionViolation(NormalizationError):
    pass


class PreconditionViolated(MetricQMError):
    pass
