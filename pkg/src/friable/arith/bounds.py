"""Rankin bound and error envelopes for psi_f^*."""

import math
from dataclasses import dataclass

from ..errors import InadmissibleSpecError, InvalidInputError
from ..specfn import KappaLike, as_kappa, h_envelope, xi_kappa
from .hypotheses import z_moments
from .multiplicative import MultiplicativeSpec
from .primes import primes_up_to

# relative slack absorbing rounding in the exponent sum
_ROUNDING_GUARD = 1e-13


def _u_of(x: float, y: float) -> float:
    return math.log(x) / math.log(y)


def _xi_or_one(u: float, kappa) -> float:
    return xi_kappa(u, kappa) if u > 0 else 1.0


def alpha_kappa(x: float, y: float, kappa: KappaLike) -> float:
    """1 - xi_kappa(u) / log y."""
    if not (x >= 1 and y >= 2):
        raise InvalidInputError("need x >= 1 and y >= 2")
    return 1.0 - _xi_or_one(_u_of(x, y), kappa) / math.log(y)


def rankin_bound(x: float, y: float, kappa: KappaLike, spec: MultiplicativeSpec) -> float:
    """x^(sigma-1) exp(K_sigma + sum_{p<=y} f(p)/p^sigma) at sigma = alpha_kappa(x, y).

    Since (n/x)^(1-sigma) >= 1 for n > x, psi_f^*(x, y) <= x^(sigma-1) F(sigma, y)
    and 1 + t <= e^t gives the stated form. Only primes p <= y occur, so the
    local series need only converge individually; for a function supported
    on squarefree integers any sigma is allowed.
    """
    sigma = alpha_kappa(x, y, kappa)
    if sigma <= 0.0 and not spec.is_squarefree:
        raise InadmissibleSpecError(f"sigma = {sigma} <= 0: local series diverge")
    terms = [(sigma - 1.0) * math.log(x)]
    for p in primes_up_to(int(math.floor(y))).primes:
        p = int(p)
        fp = spec.local(p, 1)
        if fp:
            terms.append(fp * p ** (-sigma))
        if not spec.is_squarefree:
            terms.append(spec.higher_series(p, sigma))
    expo = math.fsum(terms)
    return math.exp(expo + _ROUNDING_GUARD * (1.0 + abs(expo)))


@dataclass(frozen=True)
class Envelopes:
    saddle: float
    error: float
    prior_upper: float
    prior_asymptotic: float


def error_envelope(u: float, log_y: float, z1: float, z2: float) -> float:
    """E_{x,y} = min(1, Z1/log y + u log(u+1)/log y * (1 + u log(1 + Z2 log(u+1)/log y)))."""
    lu = math.log1p(u)
    inner = 1.0 + u * math.log1p(z2 * lu / log_y)
    return min(1.0, z1 / log_y + u * lu / log_y * inner)


def envelopes(x: float, y: float, kappa: KappaLike, spec: MultiplicativeSpec,
              b_const: float = 1.0) -> Envelopes:
    """Envelope functions with all unspecified constants set to 1.

    saddle: u xi_kappa(u) / log y; error: E_{x,y}; prior_upper and
    prior_asymptotic: e^{-h_B(u)}/log y and u e^{-h_B(u)}/log y.
    """
    k = as_kappa(kappa)
    if not (x >= 1 and y >= 2):
        raise InvalidInputError("need x >= 1 and y >= 2")
    u = _u_of(x, y)
    ly = math.log(y)
    z1, z2 = z_moments(y, spec)
    hb = math.exp(-h_envelope(u, b_const))
    return Envelopes(
        saddle=u * _xi_or_one(u, k) / ly,
        error=error_envelope(u, ly, z1, z2),
        prior_upper=hb / ly,
        prior_asymptotic=u * hb / ly,
    )
