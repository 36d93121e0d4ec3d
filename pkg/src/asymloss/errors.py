"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical or documented numerical domain."""


class ConvergenceError(ArithmeticError):
    """An iterative method hit its iteration cap before meeting its tolerance."""


class OutOfFamilyError(ValueError):
    """Residual moments cannot be produced by any admissible generalized Gaussian."""


class InternalConsistencyError(RuntimeError):
    """A numerical precondition the algorithm relies on was observed to fail."""


class InputError(ValueError):
    """A user-supplied file or flag is malformed."""
