"""Exception hierarchy. The CLI maps each family to an exit status."""

from __future__ import annotations


class CourtActiveError(Exception):
    """Base class for all package errors."""


class InvalidMeasurementError(CourtActiveError, ValueError):
    """A measurement carries a non-finite or otherwise unusable value."""


class ParseError(CourtActiveError, ValueError):
    """Malformed input text. ``line`` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateRecordError(ParseError):
    pass


class OrderingError(ParseError):
    pass


class ReportError(ParseError):
    """An annotation report row breaks one of the report invariants."""

    def __init__(self, message: str, line: int | None = None, rule: str = ""):
        self.rule = rule
        super().__init__(f"{message} [{rule}]" if rule else message, line)


class ConfigError(ParseError):
    pass


class ScriptError(ParseError):
    pass


class ContractViolation(CourtActiveError, ValueError):
    """An operation was called outside its precondition."""


class RangeError(ContractViolation):
    pass


class UndefinedRateError(CourtActiveError, ZeroDivisionError):
    """A rate has a zero denominator."""


class TuningError(CourtActiveError):
    """The tuning sweep has no usable cell."""
