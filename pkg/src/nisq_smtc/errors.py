"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class CompilerError(Exception):
    """Base class for every error raised by nisq_smtc."""


class QasmError(CompilerError):
    """A problem in QASM input, tagged with its 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownGate(QasmError):
    pass


class UndeclaredQubit(QasmError):
    pass


class ArityMismatch(QasmError):
    pass


class MalformedSyntax(QasmError):
    pass


class ReuseAfterMeasure(QasmError):
    pass


class CycleDetected(CompilerError):
    pass


class UnsupportedSize(CompilerError):
    pass


class ZeroDistance(CompilerError):
    pass


class TooManyQubits(CompilerError):
    pass


class BackendFailure(CompilerError):
    pass


class EmptySchedule(CompilerError):
    pass


class InstanceTooLarge(CompilerError):
    pass


class LengthMismatch(CompilerError):
    pass


class PathOutsideReservation(CompilerError):
    pass


class DirectionUnsatisfiable(CompilerError):
    pass


class UnsupportedGate(CompilerError):
    pass


class ConfigError(CompilerError):
    pass
