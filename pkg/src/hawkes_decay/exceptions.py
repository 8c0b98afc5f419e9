"""Exception hierarchy.

Two families: :class:`ValidationError` for bad inputs (CLI exit code 1) and
:class:`NumericalError` for failures of a numerical routine (CLI exit code 2).
"""


class HawkesError(Exception):
    """Base class for all package errors."""


class ValidationError(HawkesError, ValueError):
    """Input violates a documented invariant."""


class NonFinite(ValidationError):
    pass


class NegativeRate(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class EmptyStream(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class NonMonotoneTime(ValidationError):
    pass


class DimOutOfRange(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ShapeTooSmall(ValidationError):
    pass


class TooFewResamples(ValidationError):
    pass


class NonPositiveEstimate(ValidationError):
    pass


class NonStationary(ValidationError):
    pass


class NumericalError(HawkesError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy answer."""


class SafetyCapExceeded(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class DegenerateChain(NumericalError):
    pass


class LikelihoodDecrease(NumericalError):
    pass
