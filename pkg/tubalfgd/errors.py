class TubalError(Exception):
    """
    Base class for every error raised by tubalfgd.
    """


class ValidationError(TubalError, ValueError):
    """
    Raised when an input violates an operation's precondition.
    """


class NumericalError(TubalError, ArithmeticError):
    """
    Raised when a computation fails numerically.
    """


class TensorFileError(TubalError, OSError):
    """
    Raised when a tensor file cannot be decoded.
    """


class ShapeMismatch(ValidationError):
    pass


class OracleTooLarge(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class OutOfBudget(ValidationError):
    pass


class RankMismatch(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class NonRealResult(NumericalError):
    pass


class NotPsd(NumericalError):
    pass


class RankTooSmall(NumericalError):
    pass


class ZeroTensor(NumericalError):
    pass


class Diverged(NumericalError):
    pass


class SandwichViolated(NumericalError):
    pass


class BadMagic(TensorFileError):
    pass


class TruncatedFile(TensorFileError):
    pass


class ShapeOverflow(TensorFileError):
    pass
