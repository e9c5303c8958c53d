"""Exception types shared across the package."""


class QnahmError(Exception):
    """Base class for all package errors."""


class ScaleError(QnahmError):
    """Exponent grids are incompatible (target scale not a multiple)."""


class NotInvertibleError(QnahmError):
    """Series has no known nonzero lowest term."""


class DivergenceError(QnahmError):
    """An infinite product or bilateral sum does not converge formally."""


class InvalidDimensionError(QnahmError):
    """Matrix constructor called with an out-of-range dimension."""


class FactorizationError(QnahmError):
    """LDL^T hit a zero pivot with a nonzero remaining column."""


class InvalidSpecError(QnahmError):
    """A Nahm/identity spec violates its invariants (positivity, ranges)."""


class SingularParameterError(QnahmError):
    """Bailey parameter makes a required factor vanish."""


class InsufficientLengthError(QnahmError):
    """Bailey pair prefix too short for the requested truncation."""

    def __init__(self, message, required_length=None):
        super().__init__(message)
        self.required_length = required_length
