"""Exception hierarchy shared by all modules."""


class HyperSCError(Exception):
    """Base class for all package errors."""


class UsageError(HyperSCError, ValueError):
    """Invalid arguments: mismatched dimensions, non-tangent vectors, bad options."""


class ValidationError(UsageError):
    """A point or vector violates a geometric invariant beyond tolerance."""


class DomainError(HyperSCError):
    """A point lies outside the domain of a barrier or field."""


class DegeneracyError(HyperSCError):
    """A Hessian that must be positive definite is not."""


class ConvergenceError(HyperSCError):
    """An iteration cap was exceeded. Carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InvariantError(HyperSCError):
    """A certified runtime invariant (convergence bound, decrement bound) failed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
