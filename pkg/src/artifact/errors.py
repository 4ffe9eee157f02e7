"""Exception hierarchy shared by every module.

All errors derive from :class:`ArtifactError` so the CLI can map them to
exit status 1 in one place. Most also subclass :class:`ValueError` because
they describe bad inputs.
"""


class ArtifactError(Exception):
    """Base class for all package errors."""


class SchemaError(ArtifactError, ValueError):
    """A required input column is missing."""

    def __init__(self, column, path=None):
        self.column = column
        where = f" in {path}" if path else ""
        super().__init__(f"missing column {column!r}{where}")


class RowError(ArtifactError, ValueError):
    """A data row could not be parsed."""

    def __init__(self, line, reason):
        self.line = line
        super().__init__(f"line {line}: {reason}")


class BarValidationError(ArtifactError, ValueError):
    """An OHLCV bar violates its price/volume invariants."""

    def __init__(self, date, reason):
        self.date = date
        super().__init__(f"{date}: {reason}")


class GapError(ArtifactError, ValueError):
    """A calendar day precedes every observation and cannot be filled."""


class RangeError(ArtifactError, ValueError):
    """A date or index lies outside the permitted range."""


class InsufficientDataError(ArtifactError, ValueError):
    """Too few observations for the requested computation."""


class ParameterError(ArtifactError, ValueError):
    """An argument is outside its valid domain."""


class ConfigError(ArtifactError, ValueError):
    """Invalid run or feature configuration."""


class ShapeError(ArtifactError, ValueError):
    """Array shapes or lengths do not agree."""


class LabelError(ArtifactError, ValueError):
    """Classification labels are not usable (e.g. a single class)."""


class UndefinedMetricError(ArtifactError, ValueError):
    """A metric is undefined for the given inputs."""


class NumericError(ArtifactError, ArithmeticError):
    """A linear system is singular or a computation lost finiteness."""


class DataError(ArtifactError, ValueError):
    """Inputs are inconsistent with each other (e.g. unknown symbol)."""


class FitError(ArtifactError, RuntimeError):
    """No candidate model could be fitted."""

    def __init__(self, message, attempts=()):
        self.attempts = list(attempts)
        if self.attempts:
            message = f"{message}; attempts: " + ", ".join(map(str, self.attempts))
        super().__init__(message)
