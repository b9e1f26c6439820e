"""Exception hierarchy shared by every module."""


class BTPError(Exception):
    """Base class for all errors raised by hermitian_btp."""


class DimensionMismatch(BTPError, ValueError):
    pass


class NotNormal(BTPError, ValueError):
    pass


class NoConvergence(BTPError, RuntimeError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NotValidated(BTPError, ValueError):
    """Structure equations failed d^2 = 0, or are not integrable."""


class MixedBidegree(BTPError, ValueError):
    pass


class PreconditionFailed(BTPError, ValueError):
    pass


class NotBTP(PreconditionFailed):
    pass


class Balanced(PreconditionFailed):
    pass


class NotApplicable(PreconditionFailed):
    pass


class Indeterminate(BTPError, ArithmeticError):
    """A residual fell in the ambiguous band [tol, 10 tol)."""

    def __init__(self, name, residual, tol):
        super().__init__(
            f"{name}: residual {residual:.3e} lies in the ambiguous band "
            f"[{tol:.1e}, {10 * tol:.1e})"
        )
        self.name = name
        self.residual = residual
        self.tol = tol


class InvalidParameter(BTPError, ValueError):
    pass


class ShapeMismatch(InvalidParameter):
    pass


class ValidationFailed(BTPError, ValueError):
    pass


class SingularPoint(BTPError, ValueError):
    pass


class ParseError(BTPError, ValueError):
    pass


class SchemaError(BTPError, ValueError):
    pass
