"""Exception hierarchy shared by every sigprop module."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from os import PathLike

    from sigprop.nodes import SourceSpan


class SigpropError(Exception):
    """Base class for all sigprop errors."""


class ConfigError(SigpropError):
    """Invalid configuration value."""


# --- trace I/O ---


class TraceError(SigpropError):
    """Trace file could not be read."""


class TraceNotFound(TraceError):
    pass


class MalformedCsv(TraceError):
    pass


class NonMonotoneTime(TraceError):
    pass


class NonFiniteValue(TraceError):
    pass


# --- evaluation domain ---


class DomainError(SigpropError):
    """A query fell outside what the trace can answer."""


class OutOfDomain(DomainError):
    pass


class TooFewSamples(DomainError):
    pass


class GridMismatch(DomainError):
    pass


class TooFewExtrema(DomainError):
    pass


class TraceTooLarge(DomainError):
    pass


class DivisionByZero(DomainError):
    def __init__(self, t: float) -> None:
        super().__init__(f"division by zero at t={t:g}")
        self.t = t


# --- property files ---


class PropertyError(SigpropError):
    """Problem with a property definition, optionally located in the source."""

    def __init__(self, message: str, span: SourceSpan | None = None, source: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
        self.source = source

    def in_file(self, source: str | PathLike[str]) -> PropertyError:
        """Attach the file the definition was read from; type and span are kept."""
        self.source = str(source)
        return self

    def __str__(self) -> str:
        where = [] if self.source is None else [self.source]
        if self.span is not None:
            where += [str(self.span.line), str(self.span.column)]
        if not where:
            return self.message
        return f"{':'.join(where)}: {self.message}"


class PropertySyntaxError(PropertyError):
    pass


class DuplicatePropertyName(PropertyError):
    pass


class OverlappingIntervals(PropertyError):
    pass


class UnknownSignal(PropertyError):
    pass


class MissingDerivativeColumn(PropertyError):
    pass


class InvalidThreshold(PropertyError):
    pass


class InvalidTransform(PropertyError):
    pass


class NotProjectable(PropertyError):
    pass


class PunctualInterval(PropertyError):
    pass


class NotExpressible(PropertyError):
    pass


class EvaluationError(SigpropError):
    """An error raised while evaluating one property."""

    def __init__(self, name: str, cause: Exception, span: SourceSpan | None = None) -> None:
        where = f" (line {span.line})" if span is not None else ""
        super().__init__(f"property {name}{where}: {cause}")
        self.name = name
        self.cause = cause
        self.span = span
