"""Exception types shared across the package."""


class FriableError(Exception):
    """Base class for all package errors."""


class InvalidInputError(FriableError, ValueError):
    """An argument or instance violates a documented precondition."""


class BudgetExceededError(FriableError):
    """An enumeration would exceed the configured element budget."""


class ConvergenceError(FriableError, ArithmeticError):
    """An iterative solver or series failed to reach its tolerance."""


class TableRangeError(FriableError):
    """A query falls outside the certified range of a tabulation."""


class InadmissibleSpecError(InvalidInputError):
    """A multiplicative function lies outside the class a routine supports."""


class VanishingPolynomialError(FriableError):
    """A polynomial vanishes identically modulo the requested modulus."""
