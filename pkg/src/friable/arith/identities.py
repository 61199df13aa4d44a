"""Exact checks of the two functional equations satisfied by psi_f.

Tail equation, for x >= 2 and y >= 2:

    psi*(x) log x + int_x^inf psi*(t)/t dt
        = kappa int_{x/y}^x psi*(t)/t dt + E1 + E2 + E3

    E1 = sum_{n > x/y, P(n) <= y} f(n)/n (r_f(y) - r_f(x/n))
    E2 = -sum_{nu>=1} sum_{p<=y} f(p) f(p^nu) log p / p^(nu+1) psi*_{f_p}(x/p^(nu+1))
    E3 =  sum_{nu>=2} sum_{p<=y} f(p^nu) log p^nu / p^nu     psi*_{f_p}(x/p^nu)

Partial-sum equation, for x >= 1 with psi(x) = psi_f(x, x):

    psi(x) log x = (kappa + 1) int_1^x psi(t)/t dt + D1 + D2 + D3

with D1..D3 the analogous finite sums. All integrals of the step functions
psi, psi* reduce to finite sums of f(n)/n times log-lengths.
"""

import math
from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..errors import BudgetExceededError, InadmissibleSpecError, InvalidInputError
from ..specfn import KappaLike, as_kappa
from .hypotheses import RfEvaluator
from .multiplicative import MultiplicativeSpec
from .primes import primes_up_to
from .sums import DEFAULT_BUDGET, f1y, friable_arrays


@dataclass(frozen=True)
class IdentityCheck:
    """lhs - rhs = residual; ``scale`` is the sum of the absolute values of the
    terms making up both sides, so ``relative`` stays meaningful when both
    sides vanish (for instance when every friable integer lies below x).
    """

    lhs: float
    rhs: float
    residual: float
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.residual) / self.scale if self.scale > 0 else abs(self.residual)


def _check(lhs_terms, rhs_terms) -> IdentityCheck:
    lhs, rhs = math.fsum(lhs_terms), math.fsum(rhs_terms)
    scale = math.fsum(abs(t) for t in list(lhs_terms) + list(rhs_terms))
    return IdentityCheck(lhs=lhs, rhs=rhs, residual=lhs - rhs, scale=scale)


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).tolist())


class _Support:
    """Sorted integers with weights w = f(n)/n, answering tail and prefix sums."""

    def __init__(self, ns: np.ndarray, w: np.ndarray):
        self.ns = ns
        self.w = w
        self.suffix = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))
        self.prefix = np.concatenate(([0.0], np.cumsum(w)))

    def above(self, t: float) -> float:
        """sum of w_n over n > t."""
        return float(self.suffix[np.searchsorted(self.ns, math.floor(t), side="right")])

    def upto(self, t: float) -> float:
        """sum of w_n over n <= t (zero for t < 1)."""
        if t < 1:
            return 0.0
        return float(self.prefix[np.searchsorted(self.ns, math.floor(t), side="right")])


def verify_tail_equation(x: float, y: float, kappa: KappaLike, spec: MultiplicativeSpec,
                         mode: str = "exact", budget: int = DEFAULT_BUDGET) -> IdentityCheck:
    """Both sides of the tail equation.

    Args:
        mode: "exact" sums over the whole (finite) support of a squarefree f;
            "series" works for any f, using the local series of f to express
            the infinite parts (sums over n > x) in closed form.
    """
    if not (x >= 2 and y >= 2):
        raise InvalidInputError("need x >= 2 and y >= 2")
    k = as_kappa(kappa).value
    primes = [int(p) for p in primes_up_to(int(math.floor(y))).primes]
    rf = RfEvaluator(spec, k, max(y, 2.0))
    log_x = math.log(x)
    if mode == "exact":
        return _tail_exact(x, y, k, spec, primes, rf, log_x, budget)
    if mode == "series":
        return _tail_series(x, y, k, spec, primes, rf, log_x, budget)
    raise InvalidInputError(f"unknown mode {mode!r}")


def _tail_exact(x, y, k, spec, primes, rf, log_x, budget):
    if not spec.is_squarefree:
        raise InadmissibleSpecError("exact mode needs f supported on squarefree integers; use mode='series'")
    n_y = math.prod(primes)
    if n_y >= 2 ** 62:
        raise BudgetExceededError("product of primes up to y exceeds 64-bit range")
    ns, fs, _ = friable_arrays(n_y, y, spec, budget, skip_zero=True)
    w = fs / ns
    full = _Support(ns, w)
    restricted_support: Dict[int, _Support] = {}
    for p in primes:
        keep = ns % p != 0
        restricted_support[p] = _Support(ns[keep], w[keep])

    above_x = ns > x
    lhs_terms = [full.above(x) * log_x, _fsum(w[above_x] * np.log(ns[above_x] / x))]

    lo = x / y
    mid = ns > lo
    main = k * _fsum(w[mid] * np.log(np.minimum(ns[mid], x) / lo))
    r_y = rf(float(y))
    e1 = _fsum(w[mid] * (r_y - rf(x / ns[mid])))
    e2_terms = []
    for p in primes:
        fp1 = spec.local(p, 1)
        if fp1:
            e2_terms.append(-fp1 * fp1 * math.log(p) / p ** 2 * restricted_support[p].above(x / p ** 2))
    return _check(lhs_terms, [main, e1, math.fsum(e2_terms)])


def _tail_series(x, y, k, spec, primes, rf, log_x, budget):
    X = int(math.floor(x))
    ns, fs, _ = friable_arrays(X, y, spec, budget, skip_zero=True)
    w = fs / ns
    logn = np.log(ns.astype(float))
    total = f1y(y, spec)
    sums = {p: spec.local_sums(p) for p in primes}
    # sum over all y-friable n of f(n) log n / n, from the logarithmic derivative
    big_l = total * math.fsum(math.log(p) * s1 / s0 for p, (s0, s1) in sums.items())
    lhs_terms = [big_l, -_fsum(w * logn)]

    lo = x / y
    integral_psi = _fsum(w * np.log(x / np.maximum(ns, lo)))
    main = k * (total * math.log(y) - integral_psi)

    r_y = rf(float(y))
    psi_lo = _fsum(w[ns <= lo]) if lo >= 1 else 0.0
    mid = ns > lo
    e1 = r_y * (total - psi_lo) - _fsum(w[mid] * rf(x / ns[mid]))

    e2_terms, e3_terms = [], []
    for p in primes:
        s0, s1 = sums[p]
        f_p_total = total / s0
        coprime = ns % p != 0
        sub = _Support(ns[coprime], w[coprime])

        def star(t):
            return f_p_total - sub.upto(t)

        lp = math.log(p)
        fp1 = spec.local(p, 1)
        # E2: nu with p^(nu+1) <= x explicitly, the rest has psi* = F_p(1, y)
        if fp1:
            acc, partial, nu = [], 0.0, 1
            while p ** (nu + 1) <= x:
                a = spec.local(p, nu) / p ** nu
                partial += a
                acc.append(a * star(x / p ** (nu + 1)))
                nu += 1
            acc.append(f_p_total * (s0 - 1.0 - partial))
            e2_terms.append(-fp1 * lp / p * math.fsum(acc))
        if not spec.is_squarefree:
            acc, partial, nu = [], fp1 / p, 2
            while p ** nu <= x:
                a = nu * spec.local(p, nu) / p ** nu
                partial += a
                acc.append(a * star(x / p ** nu))
                nu += 1
            acc.append(f_p_total * (s1 - partial))
            e3_terms.append(lp * math.fsum(acc))
    return _check(lhs_terms, [main, e1, math.fsum(e2_terms), math.fsum(e3_terms)])


def verify_partial_sum_equation(x: float, kappa: KappaLike, spec: MultiplicativeSpec,
                                budget: int = DEFAULT_BUDGET) -> IdentityCheck:
    """Both sides of psi(x) log x = (kappa + 1) int_1^x psi(t)/t dt + D1 + D2 + D3."""
    if not x >= 1:
        raise InvalidInputError("x must be >= 1")
    k = as_kappa(kappa).value
    X = int(math.floor(x))
    ns, fs, _ = friable_arrays(X, max(X, 1), spec, budget, skip_zero=True)
    w = fs / ns
    rf = RfEvaluator(spec, k, max(x, 2.0))
    log_x = math.log(x)
    lhs = _fsum(w) * log_x
    integral = _fsum(w * np.log(x / ns))
    d1 = _fsum(w * rf(x / ns))
    d2_terms, d3_terms = [], []
    for p in (int(q) for q in primes_up_to(max(2, math.isqrt(X))).primes):
        if p * p > X:
            break
        coprime = ns % p != 0
        sub = _Support(ns[coprime], w[coprime])
        lp = math.log(p)
        fp1 = spec.local(p, 1)
        nu = 1
        while p ** (nu + 1) <= x:
            if fp1:
                d2_terms.append(-fp1 * spec.local(p, nu) * lp / p ** (nu + 1) * sub.upto(x / p ** (nu + 1)))
            nu += 1
        nu = 2
        while p ** nu <= x:
            fv = spec.local(p, nu)
            if fv:
                d3_terms.append(fv * nu * lp / p ** nu * sub.upto(x / p ** nu))
            nu += 1
    return _check([lhs], [(k + 1.0) * integral, d1, math.fsum(d2_terms), math.fsum(d3_terms)])
