"""Friable sums of multiplicative functions, Dickman-type special functions
and the Selberg prime-power sieve."""

from . import arith, sieve, specfn
from .errors import (BudgetExceededError, ConvergenceError, FriableError, InadmissibleSpecError,
                     InvalidInputError, TableRangeError, VanishingPolynomialError)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "ConvergenceError", "FriableError", "InadmissibleSpecError",
    "InvalidInputError", "TableRangeError", "VanishingPolynomialError", "arith", "sieve", "specfn",
]
