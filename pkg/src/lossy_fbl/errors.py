"""Exception hierarchy; the CLI maps each class to an exit code."""


class LossyFBLError(Exception):
    exit_code = 1


class DomainError(LossyFBLError, ValueError):
    """An argument lies outside the region where a quantity is defined."""

    exit_code = 2


class BudgetExceededError(LossyFBLError):
    """Exact enumeration would exceed the configured work budget."""

    exit_code = 3


class ConvergenceError(LossyFBLError, ArithmeticError):
    """A root find, bracket search or quadrature did not converge."""

    exit_code = 4

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class MonotonicityError(ConvergenceError):
    """A bound family failed its monotonicity spot check."""
