"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class FFApproxError(Exception):
    exit_code = 1


class ParseError(FFApproxError, ValueError):
    exit_code = 2

    def __init__(self, message, text=None, pos=None):
        if text is not None and pos is not None:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)
        self.text = text
        self.pos = pos


class PrecisionError(FFApproxError, ArithmeticError):
    """Raised when a result would need coefficients that are not certified."""

    exit_code = 3


class NoSolutionError(FFApproxError):
    exit_code = 4


class VerificationError(FFApproxError, AssertionError):
    """An internal cross-check failed. Always indicates a bug or a broken precondition."""

    exit_code = 5


class DomainError(FFApproxError, ValueError):
    """Input outside the mathematical domain of an operation (p = 2, odd valuation, ...)."""

    exit_code = 2
