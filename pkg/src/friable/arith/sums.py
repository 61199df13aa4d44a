"""Weighted sums over friable integers and the Euler product F(1, y)."""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import BudgetExceededError, ConvergenceError, InvalidInputError
from .multiplicative import MultiplicativeSpec
from .primes import primes_up_to

DEFAULT_BUDGET = 10 ** 7
# below this x the plain enumeration is used by method="auto"
ENUMERATION_CUTOFF = 2 * 10 ** 6
LEAF_TABLE_LIMIT = 2 * 10 ** 6


def _floor_arg(x: float) -> int:
    if not x >= 1:
        raise InvalidInputError("x must be >= 1")
    return int(math.floor(x))


def _primes_for(x: int, y: float) -> np.ndarray:
    if y < 2 or x < 2:
        return np.zeros(0, dtype=np.int64)
    return primes_up_to(int(min(math.floor(y), x))).primes


def friable_arrays(x: float, y: float, spec: Optional[MultiplicativeSpec] = None,
                   budget: int = DEFAULT_BUDGET, skip_zero: bool = False,
                   track_largest: bool = False):
    """Sorted y-friable n <= x, with f(n) and optionally the index of P(n).

    Built by multiplying in prime powers from the largest prime down, so the
    largest prime factor of each new element is known when it is created.
    With ``skip_zero`` the integers with f(n) = 0 are dropped (together with
    all their multiples, which also vanish).

    Returns:
        (n, fn, lp) arrays; lp is None unless ``track_largest``; lp = -1 for n = 1.
    """
    X = _floor_arg(x)
    primes = _primes_for(X, y)
    ns = np.ones(1, dtype=np.int64)
    fs = np.ones(1, dtype=float)
    lp = np.full(1, -1, dtype=np.int64) if track_largest else None
    for idx in range(len(primes) - 1, -1, -1):
        p = int(primes[idx])
        pieces_n, pieces_f, pieces_l = [ns], [fs], [lp]
        pk, nu = p, 1
        while pk <= X:
            cnt = int(np.searchsorted(ns, X // pk, side="right"))
            if cnt == 0:
                break
            val = spec.local(p, nu) if spec is not None else 1.0
            if not (skip_zero and val == 0.0):
                pieces_n.append(ns[:cnt] * pk)
                pieces_f.append(fs[:cnt] * val)
                if track_largest:
                    base = lp[:cnt]
                    pieces_l.append(np.where(base < 0, idx, base))
            pk *= p
            nu += 1
        if len(pieces_n) == 1:
            continue
        total = sum(len(a) for a in pieces_n)
        if total > budget:
            raise BudgetExceededError(f"more than {budget} friable integers below {X}")
        ns = np.concatenate(pieces_n)
        order = np.argsort(ns, kind="stable")
        ns = ns[order]
        fs = np.concatenate(pieces_f)[order]
        if track_largest:
            lp = np.concatenate(pieces_l)[order]
    return ns, fs, lp


def enumerate_friable(x: float, y: float, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All n <= x with P(n) <= y in ascending order (P(1) = 1)."""
    if y < 1:
        raise InvalidInputError("y must be >= 1")
    ns, _, _ = friable_arrays(x, y, None, budget)
    return ns


def _weights(ns, fs, power):
    return fs / ns if power == 1 else fs


def _sum_by_recursion(x: int, y: float, spec: MultiplicativeSpec, power: int,
                      leaf_limit: int, budget: int) -> float:
    """Sum of f(n)/n^power over y-friable n <= x, for x beyond enumeration.

    R(t, k), the sum over n <= t built from the first k primes, satisfies
    R(t, k) = 1 + sum_{j<k} sum_{nu>=1} w(p_j^nu) R(t / p_j^nu, j). The
    recursion is unrolled until t drops below ``leaf_limit``; the leaves are
    answered from a table of friables below the limit grouped by largest
    prime factor.
    """
    primes = [int(p) for p in _primes_for(x, y)]
    T = min(leaf_limit, x)
    ns, fs, lp = friable_arrays(T, y, spec, budget, skip_zero=True, track_largest=True)
    w = _weights(ns, fs.astype(float), power)

    local_w = {}

    def weight(j, nu, pk):
        key = (j, nu)
        if key not in local_w:
            local_w[key] = spec.local(primes[j], nu) / (pk if power == 1 else 1)
        return local_w[key]

    direct: List[float] = []
    q_t: List[int] = []
    q_k: List[int] = []
    q_c: List[float] = []
    stack: List[Tuple[int, int, float]] = [(x, len(primes), 1.0)]
    while stack:
        t, k, coef = stack.pop()
        if t <= T:
            q_t.append(t)
            q_k.append(k)
            q_c.append(coef)
            continue
        direct.append(coef)
        for j in range(k):
            p = primes[j]
            pk, nu = p, 1
            while pk <= t:
                wv = weight(j, nu, pk)
                if wv != 0.0:
                    stack.append((t // pk, j, coef * wv))
                pk *= p
                nu += 1

    if q_t:
        qt = np.array(q_t, dtype=np.int64)
        qk = np.array(q_k, dtype=np.int64)
        qc = np.array(q_c, dtype=float)
        order = np.argsort(-qk, kind="stable")
        qt, qk, qc = qt[order], qk[order], qc[order]
        vals = np.ones(len(qt))  # n = 1
        cls_order = np.argsort(lp, kind="stable")
        lp_sorted = lp[cls_order]
        bounds = np.searchsorted(lp_sorted, np.arange(len(primes) + 1), side="left")
        neg_k = -qk
        for c in range(len(primes)):
            lo, hi = bounds[c], bounds[c + 1]
            if lo == hi:
                continue
            m = int(np.searchsorted(neg_k, -c, side="left"))  # queries with k > c
            if m == 0:
                break
            sel = cls_order[lo:hi]
            n_c = ns[sel]
            cum = np.concatenate(([0.0], np.cumsum(w[sel])))
            pos = np.searchsorted(n_c, qt[:m], side="right")
            vals[:m] += cum[pos]
        direct.extend((qc * vals).tolist())
    return math.fsum(direct)


def _weighted_sum(x: float, y: float, spec: MultiplicativeSpec, power: int,
                  budget: int, method: str) -> float:
    X = _floor_arg(x)
    if y < 1:
        raise InvalidInputError("y must be >= 1")
    if method == "auto":
        method = "enumerate" if X <= ENUMERATION_CUTOFF else "recursive"
    if method == "enumerate":
        ns, fs, _ = friable_arrays(X, y, spec, budget, skip_zero=True)
        return math.fsum(_weights(ns, fs, power).tolist())
    if method == "recursive":
        return _sum_by_recursion(X, y, spec, power, LEAF_TABLE_LIMIT, budget)
    raise InvalidInputError(f"unknown method {method!r}")


def psi_f(x: float, y: float, spec: MultiplicativeSpec, budget: int = DEFAULT_BUDGET,
          method: str = "auto") -> float:
    """sum of f(n)/n over y-friable n <= x."""
    return _weighted_sum(x, y, spec, 1, budget, method)


def big_psi_f(x: float, y: float, spec: MultiplicativeSpec, budget: int = DEFAULT_BUDGET,
              method: str = "auto") -> float:
    """sum of f(n) over y-friable n <= x."""
    return _weighted_sum(x, y, spec, 0, budget, method)


def f1y(y: float, spec: MultiplicativeSpec) -> float:
    """F(1, y): the Euler product over p <= y of sum_nu f(p^nu)/p^nu."""
    if y < 1:
        raise InvalidInputError("y must be >= 1")
    if y < 2:
        return 1.0
    logs = [spec.log_local(int(p)) for p in primes_up_to(int(math.floor(y))).primes]
    return math.exp(math.fsum(logs))


def psi_f_star(x: float, y: float, spec: MultiplicativeSpec, budget: int = DEFAULT_BUDGET,
               method: str = "auto") -> float:
    """F(1, y) - psi_f(x, y), clamped at 0 against rounding."""
    total = f1y(y, spec)
    diff = total - psi_f(x, y, spec, budget, method)
    if diff < 0.0:
        if diff < -1e-12 * total:
            raise ConvergenceError(f"psi_f exceeds F(1,y) by {-diff}")
        return 0.0
    return diff


@dataclass(frozen=True)
class FriableSumReport:
    x: float
    y: float
    u: float
    psi: float
    f1y: float
    psi_star: float
    lambda_u: float
    deviation: float
    saddle_envelope: float
    error_envelope: float


def friable_report(x: float, y: float, kappa, spec: MultiplicativeSpec, table=None,
                   budget: int = DEFAULT_BUDGET, method: str = "auto") -> FriableSumReport:
    """psi, psi*, F(1,y) and the deviation psi* / (F(1,y) lambda_kappa(u))."""
    from ..specfn import as_kappa, default_table, lambda_kappa
    from .bounds import envelopes

    k = as_kappa(kappa)
    if not y >= 2:
        raise InvalidInputError("y must be >= 2")
    table = table if table is not None else default_table(k.value)
    u = math.log(x) / math.log(y)
    psi = psi_f(x, y, spec, budget, method)
    total = f1y(y, spec)
    star = total - psi
    if star < 0.0:
        if star < -1e-12 * total:
            raise ConvergenceError("psi_f exceeds F(1,y)")
        star = 0.0
    lam = lambda_kappa(u, table)
    env = envelopes(x, y, k, spec, 1.0)
    return FriableSumReport(
        x=x, y=y, u=u, psi=psi, f1y=total, psi_star=star, lambda_u=lam,
        deviation=star / (total * lam), saddle_envelope=env.saddle, error_envelope=env.error,
    )
