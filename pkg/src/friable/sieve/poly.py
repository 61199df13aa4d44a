"""Root counts of integer polynomials modulo prime powers.

Coefficients are always given in ascending order: (c0, c1, ..., cd).
"""

from functools import lru_cache
from math import comb
from typing import List, Sequence, Tuple

import numpy as np
import sympy

from ..arith.primes import factorize, prime_power_split
from ..errors import InvalidInputError, VanishingPolynomialError

BRUTE_CAP = 10 ** 6
HENSEL_DEPTH_CAP = 20
HENSEL_NODE_CAP = 200_000


def _normalize(coeffs: Sequence[int]) -> Tuple[int, ...]:
    c = [int(a) for a in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _rho_brute(coeffs: Tuple[int, ...], modulus: int) -> int:
    x = np.arange(modulus, dtype=np.int64)
    acc = np.zeros(modulus, dtype=np.int64)
    for a in reversed(coeffs):
        acc = (acc * x + (a % modulus)) % modulus
    return int(np.count_nonzero(acc == 0))


def _taylor(coeffs: Tuple[int, ...], r: int) -> List[int]:
    """Coefficients of G(r + X)."""
    d = len(coeffs) - 1
    return [sum(coeffs[i] * comb(i, j) * r ** (i - j) for i in range(j, d + 1)) for j in range(d + 1)]


def _rho_hensel(coeffs: Tuple[int, ...], p: int, nu: int) -> int:
    """Count roots mod p^nu by lifting roots level by level.

    A root r mod p^k whose derivative is a unit lifts uniquely. Otherwise the
    class r + p^k Z is either entirely roots mod p^nu (detected from the
    valuations of the Taylor coefficients) or split into its p children.
    """
    if p <= BRUTE_CAP * 10:
        base = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for a in reversed(coeffs):
            acc = (acc * base + (a % p)) % p
        roots = [int(r) for r in np.flatnonzero(acc == 0)]
    else:
        raise InvalidInputError(f"prime {p} too large for root finding")

    nodes = 0

    def lift(r: int, k: int, depth: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > HENSEL_NODE_CAP:
            raise InvalidInputError("Hensel expansion exceeded its node budget")
        if k >= nu:
            return 1
        c = _taylor(coeffs, r)
        if len(c) > 1 and c[1] % p != 0:
            return 1
        if min(_vp(cj, p) + j * k for j, cj in enumerate(c)) >= nu:
            return p ** (nu - k)
        if depth >= HENSEL_DEPTH_CAP:
            raise InvalidInputError("singular root expansion exceeded the depth cap")
        pk = p ** k
        mod_next = pk * p
        total = 0
        for t in range(p):
            s = r + pk * t
            if poly_eval(coeffs, s) % mod_next == 0:
                total += lift(s, k + 1, depth + 1)
        return total

    return sum(lift(r, 1, 0) for r in roots)


def rho_poly(modulus: int, coeffs: Sequence[int], method: str = "auto",
             allow_vanishing: bool = False) -> int:
    """Number of x mod p^nu with G(x) = 0 mod p^nu.

    Args:
        modulus: a prime power p^nu (1 is accepted and gives 1).
        coeffs: ascending integer coefficients of G.
        method: "auto" (brute force up to BRUTE_CAP, lifting above),
            "brute" or "hensel".
        allow_vanishing: return p^nu instead of raising when G vanishes
            identically modulo p^nu.

    Returns:
        The root count.
    """
    coeffs = _normalize(coeffs)
    if modulus == 1:
        return 1
    split = prime_power_split(modulus)
    if split is None:
        raise InvalidInputError(f"{modulus} is not a prime power")
    p, nu = split
    if method == "auto":
        method = "brute" if modulus <= BRUTE_CAP else "hensel"
    if method == "brute":
        count = _rho_brute(coeffs, modulus)
    elif method == "hensel":
        count = _rho_hensel(coeffs, p, nu)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    if count == modulus and not allow_vanishing:
        raise VanishingPolynomialError(f"G vanishes identically modulo {modulus}")
    return count


def rho_composite(d: int, coeffs: Sequence[int], allow_vanishing: bool = True) -> int:
    """rho(d; G) via the Chinese remainder theorem."""
    out = 1
    for p, nu in factorize(d).items():
        out *= rho_poly(p ** nu, coeffs, allow_vanishing=allow_vanishing)
    return out


def _sympy_poly(coeffs: Tuple[int, ...]):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(coeffs)), x, domain="ZZ")


def is_squarefree_poly(coeffs: Sequence[int]) -> bool:
    c = _normalize(coeffs)
    if len(c) <= 2:
        return any(c)
    return _sympy_poly(c).is_sqf


@lru_cache(maxsize=256)
def _disc_and_lc(coeffs: Tuple[int, ...]) -> Tuple[int, int, int]:
    deg = len(coeffs) - 1
    if deg == 0:
        return 0, 1, coeffs[0]
    disc = 1 if deg == 1 else int(sympy.discriminant(_sympy_poly(coeffs)))
    return deg, disc, coeffs[-1]


def bad_primes(coeffs: Sequence[int]) -> Tuple[int, ...]:
    """Primes dividing the discriminant or the leading coefficient (or the constant)."""
    deg, disc, lc = _disc_and_lc(_normalize(coeffs))
    n = abs(disc * lc) if deg > 0 else abs(lc)
    return tuple(sorted(factorize(n))) if n > 1 else ()


def discriminant_valuation_bound(coeffs: Sequence[int], p: int) -> int:
    """A level after which rho(p^nu; G) no longer changes, for squarefree G."""
    deg, disc, lc = _disc_and_lc(_normalize(coeffs))
    if deg == 0:
        return _vp(lc, p) + 1
    if disc == 0:
        raise InvalidInputError("polynomial is not squarefree")
    return 2 * _vp(disc, p) + 2 * deg * _vp(lc, p) + 2


def irreducible_factor_count(coeffs: Sequence[int]) -> int:
    """Number of distinct nonconstant irreducible factors of G over Q."""
    c = _normalize(coeffs)
    if len(c) == 1:
        return 0
    _, factors = _sympy_poly(c).factor_list()
    return sum(1 for f, _ in factors if f.degree() > 0)
