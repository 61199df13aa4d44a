"""Prime tables and small factorization helpers."""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict

import numpy as np

from ..errors import BudgetExceededError, InvalidInputError

SIEVE_LIMIT_BUDGET = 2 * 10 ** 8


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)

    def upto(self, z: float) -> np.ndarray:
        """Primes p <= z (z may exceed nothing beyond ``limit``)."""
        return self.primes[: int(np.searchsorted(self.primes, math.floor(z), side="right"))]


@lru_cache(maxsize=16)
def _sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.setflags(write=False)
    return out


def primes_up_to(limit: int) -> PrimeTable:
    """All primes <= limit, by the sieve of Eratosthenes."""
    limit = int(math.floor(limit))
    if limit < 1:
        raise InvalidInputError("limit must be >= 1")
    if limit > SIEVE_LIMIT_BUDGET:
        raise BudgetExceededError(f"prime sieve limit {limit} exceeds budget {SIEVE_LIMIT_BUDGET}")
    # sieve a power of two at least as large, so nearby limits share the cache
    size = max(1024, 1 << (limit - 1).bit_length())
    allp = _sieve(min(size, SIEVE_LIMIT_BUDGET))
    return PrimeTable(limit=limit, primes=allp[: int(np.searchsorted(allp, limit, side="right"))])


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization of n >= 1 by trial division."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    out: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def largest_prime_factor(n: int) -> int:
    """P(n), with P(1) = 1."""
    f = factorize(n)
    return max(f) if f else 1


def prime_power_split(q: int):
    """(p, nu) if q = p^nu with nu >= 1, else None."""
    f = factorize(q) if q > 1 else {}
    if len(f) != 1:
        return None
    (p, nu), = f.items()
    return p, nu
