from __future__ import annotations


class EgoCountError(RuntimeError):
    """Base class for all errors raised by egocount. The `exit_code` is what the
    command line returns when the error reaches it."""

    exit_code: int = 2


class GraphParseError(EgoCountError):

    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownVertexError(EgoCountError): ...


class InvalidStateError(EgoCountError): ...


class ModeMismatchError(EgoCountError): ...


class PatternTooLargeError(EgoCountError): ...


class EmptyObservableSet(EgoCountError): ...


class CompositionRowSumMismatch(EgoCountError): ...


class DimensionMismatch(EgoCountError): ...


class InducedCountingUnsupported(EgoCountError): ...


class UnlabeledSample(EgoCountError): ...


class UnsupportedDesign(EgoCountError): ...


class InvalidProbability(EgoCountError): ...


class SampleSizeError(EgoCountError): ...


class DisconnectedGraphError(EgoCountError): ...


class BudgetExceeded(EgoCountError): ...


class UndefinedMetric(EgoCountError): ...
