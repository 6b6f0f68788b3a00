"""Exception types shared across the package."""


class TagMismatchError(ValueError):
    """Operands live on different algebras or groups."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class NonFiniteError(ValueError):
    """A function or gradient evaluated to NaN or infinity."""


class ConvergenceError(RuntimeError):
    """An iterative solve did not reach its tolerance.

    The final residual is kept on ``residual`` so callers can report it.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual
