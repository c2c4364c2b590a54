"""
Exceptions raised by the geometry toolkit.

Every error carries a stable ``error_code`` (the kebab-case name used in run
records and command diagnostics) and optional ``details`` for the values that
triggered it.
"""


class GeometryError(Exception):
    """Base exception for toolkit errors."""

    error_code = 'geometry-error'

    def __init__(self, message, error_code=None, details=None):
        self.message = message
        if error_code is not None:
            self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


class PointOutsideChart(GeometryError):
    error_code = 'point-outside-chart'


class StepTooLarge(GeometryError):
    """The point is inside the chart but closer to its edge than the stencil needs."""
    error_code = 'step-too-large-for-margin'


class MetricSingular(GeometryError):
    error_code = 'metric-singular'


class DegenerateSpan(GeometryError):
    error_code = 'degenerate-span'


class InvalidDimensions(GeometryError):
    error_code = 'invalid-dimensions'


class PLessThanTwo(InvalidDimensions):
    error_code = 'p-less-than-2'


class TOutOfRange(GeometryError):
    error_code = 't-out-of-range'


class PointOutsideUnitBall(GeometryError):
    error_code = 'point-outside-unit-ball'


class ThresholdUnreachable(GeometryError):
    error_code = 'threshold-unreachable'


class InvalidBracket(GeometryError):
    error_code = 'invalid-bracket'


class UnknownCase(GeometryError):
    error_code = 'unknown-case'
