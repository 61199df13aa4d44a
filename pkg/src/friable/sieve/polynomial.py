"""Sieving the values of an integer polynomial on an interval.

Counts n in I such that p^nu does not divide G(n) for every p^nu || q, and
compares the count with the Selberg bound built from the root counts of G.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..arith.primes import factorize
from ..errors import InvalidInputError, VanishingPolynomialError
from ..specfn import KappaLike, as_kappa, default_table, j_kappa, lambda_kappa
from .poly import _normalize, rho_poly
from .selberg import DensityFunction, ResidueSystem, SieveInstance, SieveReport


@dataclass(frozen=True)
class PolynomialSieveResult:
    report: SieveReport
    count: int
    density: float  # W(q; G)
    delta_q: float
    vanishing: bool


def local_density(q: int, coeffs: Sequence[int]) -> float:
    """W(q; G) = prod over p^nu || q of (1 - rho(p^nu; G)/p^nu)."""
    if q < 1:
        raise InvalidInputError("q must be >= 1")
    out = 1.0
    for p, nu in sorted(factorize(q).items()):
        out *= 1.0 - rho_poly(p ** nu, coeffs, allow_vanishing=True) / p ** nu
    return out


def polynomial_sieve(interval: Tuple[int, int], q: int, coeffs: Sequence[int],
                     d_cutoff: Optional[float] = None) -> PolynomialSieveResult:
    """Sieve {G(n) : n in I} by the classes 0 mod p^nu for p^nu || q.

    Uses X = N = |I|, w(p^nu) = rho(p^nu; G), z = P(q) (2 when q = 1) and
    D = sqrt(N) by default (raised to 2 when N < 4 so that D > 1).
    When G vanishes identically modulo some p^nu || q no n survives; the
    report then has a zero bound and the count is still checked directly.
    """
    lo, hi = int(interval[0]), int(interval[1])
    if hi < lo:
        raise InvalidInputError("empty interval")
    if q < 1:
        raise InvalidInputError("q must be >= 1")
    coeffs = _normalize(coeffs)
    n = hi - lo + 1
    d = float(d_cutoff) if d_cutoff is not None else max(math.sqrt(n), 2.0)
    fq = factorize(q)
    z = float(max(fq)) if fq else 2.0
    w_sets = {(p, nu): frozenset({0}) for p, nu in fq.items()}
    rs = ResidueSystem(z, w_sets)
    w_q = local_density(q, coeffs)
    delta_q = 1.0 / math.log(3 + len(fq))
    rhos = {(p, nu): rho_poly(p ** nu, coeffs, allow_vanishing=True) for p, nu in fq.items()}
    vanishing = any(r == p ** nu for (p, nu), r in rhos.items())
    if vanishing:
        probe = SieveInstance(residues=rs, density=DensityFunction({}), d_cutoff=d, x_mass=float(n),
                              interval=(lo, hi), poly_coeffs=coeffs)
        count = probe.brute_count()
        if count != 0:
            raise VanishingPolynomialError("G vanishes mod p^nu but some n survived")
        rep = SieveReport(main_term=0.0, remainder=0.0, bound=0.0, brute_count=0,
                          weights_max_abs=1.0, x_mass=float(n), d_cutoff=d, z=z)
        return PolynomialSieveResult(rep, 0, w_q, delta_q, True)
    inst = SieveInstance(residues=rs, density=DensityFunction({k: float(v) for k, v in rhos.items()}),
                         d_cutoff=d, x_mass=float(n), interval=(lo, hi), poly_coeffs=coeffs)
    rep = inst.report()
    return PolynomialSieveResult(rep, rep.brute_count, w_q, delta_q, False)


@dataclass(frozen=True)
class SieveEnvelope:
    v: float
    j_kappa_v: float
    lambda_plus: float


def sieve_envelope(d_cutoff: float, z: float, s: int, eta: float, kappa: KappaLike) -> SieveEnvelope:
    """v = min(log D / (s log z), 3 log D / (s eta log log D)), j_kappa(v) and
    lambda_kappa(v) v log(1 + v). The second term of the minimum is dropped
    when log log D <= 0.
    """
    if not (d_cutoff > z >= 2):
        raise InvalidInputError("need D > z >= 2")
    if s < 1:
        raise InvalidInputError("s must be >= 1")
    if not 0 < eta < 0.5:
        raise InvalidInputError("eta must lie in (0, 1/2)")
    k = as_kappa(kappa)
    log_d = math.log(d_cutoff)
    v = log_d / (s * math.log(z))
    ll = math.log(log_d)
    if ll > 0:
        v = min(v, 3.0 * log_d / (s * eta * ll))
    table = default_table(k.value, max(64.0, math.ceil(v) + 16.0))
    lam = lambda_kappa(v, table)
    return SieveEnvelope(v=v, j_kappa_v=j_kappa(v, table), lambda_plus=lam * v * math.log1p(v))
