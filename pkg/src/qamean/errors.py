"""Exception hierarchy shared by every module."""


class QAMError(Exception):
    """Base class for all errors raised by qamean."""


class InvalidParameterError(QAMError, ValueError):
    pass


class DomainError(QAMError, ValueError):
    pass


class NoBracketError(QAMError, ValueError):
    pass


class QuadratureError(QAMError, ArithmeticError):
    pass


class MeanOverflowError(QAMError, OverflowError):
    """Generator value is not finite at an entry; ``entry`` names the offender."""

    def __init__(self, entry: float, message: str | None = None):
        self.entry = entry
        super().__init__(message or f"generator overflows at entry {entry!r}")


class UnsupportedGeneratorError(QAMError, TypeError):
    pass


class HypothesisViolatedError(QAMError, ValueError):
    pass


class ConstructionInfeasibleError(QAMError, ValueError):
    pass


class InternalError(QAMError, RuntimeError):
    pass
