"""Prime-mean drift r_f and measured hypothesis constants."""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import InvalidInputError
from ..specfn import EULER_GAMMA, KappaLike, as_kappa
from .multiplicative import MultiplicativeSpec
from .primes import primes_up_to


class RfEvaluator:
    """r_f(z) = sum_{p<=z} f(p) log p / p - kappa log z, with r_f = 0 on [0, 1]."""

    def __init__(self, spec: MultiplicativeSpec, kappa: KappaLike, z_max: float):
        self.kappa = as_kappa(kappa).value
        self.z_max = float(z_max)
        top = max(2, int(math.floor(z_max)))
        self.primes = primes_up_to(top).primes
        vals = np.array([spec.local(int(p), 1) * math.log(p) / p for p in self.primes])
        self.prime_terms = vals
        self.cumulative = np.cumsum(vals)

    def prime_sum(self, z):
        """sum_{p <= z} f(p) log p / p (vectorized)."""
        z = np.asarray(z, dtype=float)
        if np.any(z > self.z_max * (1 + 1e-12)):
            raise InvalidInputError("z beyond evaluator range")
        idx = np.searchsorted(self.primes, np.floor(z), side="right")
        padded = np.concatenate(([0.0], self.cumulative))
        return padded[idx]

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.zeros_like(z)
        m = z > 1.0
        out[m] = self.prime_sum(z[m]) - self.kappa * np.log(z[m])
        return float(out[0]) if scalar else out


def r_f(z: float, kappa: KappaLike, spec: MultiplicativeSpec) -> float:
    if z < 0:
        raise InvalidInputError("z must be nonnegative")
    if z <= 1.0:
        return 0.0
    k = as_kappa(kappa).value
    ps = primes_up_to(int(math.floor(z))).primes
    return math.fsum(spec.local(int(p), 1) * math.log(p) / p for p in ps) - k * math.log(z)


def z_moments(y: float, spec: MultiplicativeSpec) -> Tuple[float, float]:
    """(Z_1, Z_2) with Z_j = 1 + sum_{p<=y} f(p)^2 (log p)^j / p^2."""
    if y < 2:
        raise InvalidInputError("y must be >= 2")
    z1, z2 = [1.0], [1.0]
    for p in primes_up_to(int(math.floor(y))).primes:
        p = int(p)
        a = spec.local(p, 1) ** 2 / (p * p)
        lp = math.log(p)
        z1.append(a * lp)
        z2.append(a * lp * lp)
    return math.fsum(z1), math.fsum(z2)


def _drift_points(ev: RfEvaluator, z_max: float) -> np.ndarray:
    """r_f at 1, at p- and p for every prime p <= z_max, and at z_max, in order of z."""
    ps = ev.primes[ev.primes <= z_max]
    logp = np.log(ps.astype(float))
    at_p = ev.cumulative[: len(ps)] - ev.kappa * logp
    before = np.concatenate(([0.0], ev.cumulative[: len(ps) - 1])) - ev.kappa * logp
    pts = np.empty(2 * len(ps) + 2)
    pts[0] = 0.0
    pts[1:-1:2] = before
    pts[2:-1:2] = at_p
    last = ev.cumulative[len(ps) - 1] if len(ps) else 0.0
    pts[-1] = last - ev.kappa * math.log(z_max)
    return pts


def _one_sided(points: np.ndarray) -> float:
    """max over i >= j of points[i] - points[j]."""
    return float(np.max(points - np.minimum.accumulate(points)))


@dataclass(frozen=True)
class HypothesisReport:
    a_bilateral: float
    a_unilateral: float
    c_sum: float
    c_sum_tail: float
    z1: float
    z2: float
    bilateral_growth: bool
    unilateral_growth: bool


def hypothesis_report(spec: MultiplicativeSpec, kappa: KappaLike, z_max: float) -> HypothesisReport:
    """Measure the drift constants on [1, z_max] and the higher prime-power sum.

    r_f is decreasing between consecutive primes, so its extrema over [1, z_max]
    are attained at 1, at the primes (from either side) and at z_max; the
    suprema are therefore exact. The growth flags compare the constants on
    [1, sqrt(z_max)] and [1, z_max] and fire when the increase exceeds
    (kappa/4) log z_max, the signature of a drift proportional to log z.
    """
    if z_max < 2:
        raise InvalidInputError("z_max must be >= 2")
    k = as_kappa(kappa).value
    ev = RfEvaluator(spec, k, z_max)
    pts = _drift_points(ev, z_max)
    half = _drift_points(ev, math.sqrt(z_max)) if z_max >= 4 else pts
    a_bi = 2.0 * float(np.max(np.abs(pts)))
    a_uni = _one_sided(pts)
    thresh = 0.25 * k * math.log(z_max)
    bi_growth = a_bi - 2.0 * float(np.max(np.abs(half))) > thresh
    uni_growth = a_uni - _one_sided(half) > thresh

    sigma = 1.0 - spec.eta
    terms = [spec.higher_series(int(p), sigma) for p in ev.primes[ev.primes <= z_max]]
    tail = spec.higher_tail_bound(z_max, sigma)
    z1, z2 = z_moments(z_max, spec)
    return HypothesisReport(
        a_bilateral=a_bi, a_unilateral=a_uni, c_sum=math.fsum(terms) + tail, c_sum_tail=tail,
        z1=z1, z2=z2, bilateral_growth=bool(bi_growth), unilateral_growth=bool(uni_growth),
    )


def c_kappa(spec: MultiplicativeSpec, kappa: KappaLike, p_cut: int = 10 ** 6) -> Tuple[float, float]:
    """Estimate of prod_p (1 - 1/p)^kappa sum_nu f(p^nu)/p^nu with an error bar.

    The product is taken over p <= p_cut. For the remaining primes the factor
    is exp(sum (f(p) - kappa)/p + O(1/p^2)), and partial summation turns the
    first sum into (r_inf - r_f(p_cut)) / log p_cut plus a smaller integral.
    r_inf is estimated by the mean of r_f over primes in [sqrt(p_cut), p_cut];
    the spread of r_f on that range sets the error bar.
    """
    k = as_kappa(kappa).value
    ps = primes_up_to(p_cut).primes
    logs = [k * math.log1p(-1.0 / p) + spec.log_local(int(p)) for p in ps]
    log_c = math.fsum(logs)
    ev = RfEvaluator(spec, k, p_cut)
    window = ps[ps >= math.isqrt(p_cut)]
    r_vals = ev.cumulative[len(ps) - len(window):] - k * np.log(window.astype(float))
    r_end = float(ev(float(p_cut)))
    log_p = math.log(p_cut)
    log_c += (float(np.mean(r_vals)) - r_end) / log_p
    value = math.exp(log_c)
    spread = float(np.max(r_vals) - np.min(r_vals))
    err = value * (2.0 * spread / log_p + 10.0 / p_cut)
    return value, err


def mertens_ratio(y: float, spec: MultiplicativeSpec, kappa: KappaLike) -> float:
    """F(1, y) / (e^{gamma kappa} (log y)^kappa)."""
    from .sums import f1y

    k = as_kappa(kappa).value
    return f1y(y, spec) / (math.exp(EULER_GAMMA * k) * math.log(y) ** k)
