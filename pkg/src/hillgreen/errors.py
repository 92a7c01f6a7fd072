"""Exception types shared across the package."""


class HillgreenError(Exception):
    """Base class for all package-specific failures."""


class DomainError(HillgreenError, ValueError):
    """Evaluation was requested outside a potential's domain."""


class IntegrationError(HillgreenError, RuntimeError):
    """The adaptive integrator could not complete a sweep."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class ResonanceError(HillgreenError, ArithmeticError):
    """The homogeneous boundary problem has a nontrivial solution at this lambda.

    The boundary determinant is stored so callers can report how close to
    singular the problem actually was.
    """

    def __init__(self, message: str, determinant: float = 0.0, bc=None, lam: float | None = None):
        super().__init__(message)
        self.determinant = determinant
        self.bc = bc
        self.lam = lam


class PoleError(HillgreenError, ArithmeticError):
    """A closed-form kernel was requested at (or too close to) one of its poles."""

    def __init__(self, message: str, denominator: float = 0.0):
        super().__init__(message)
        self.denominator = denominator


class HypothesisNotMet(HillgreenError, RuntimeError):
    """A comparison statement was invoked with its sign hypothesis violated."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point
