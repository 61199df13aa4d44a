"""Dickman-type special functions.

The central object is rho_kappa, the continuous solution of

    u rho'(u) + (1 - kappa) rho(u) + kappa rho(u - 1) = 0    (u > 1),
    rho(u) = u^(kappa - 1) / Gamma(kappa)                    (0 < u <= 1),

together with its normalized tail integral lambda_kappa, the adjoint solution
mu_kappa and the saddle point xi_kappa that governs their asymptotics.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, InvalidInputError, TableRangeError

EULER_GAMMA = 0.57721566490153286061

_SERIES_TERMS = 64
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class Kappa:
    """Positive convolution-power parameter."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v <= 0.0:
            raise InvalidInputError(f"kappa must be a positive real, got {self.value!r}")
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value


KappaLike = Union[Kappa, float, int]


def as_kappa(kappa: KappaLike) -> Kappa:
    return kappa if isinstance(kappa, Kappa) else Kappa(kappa)


@dataclass(frozen=True)
class NumericConfig:
    quad_rel_tol: float = 1e-10
    newton_tol: float = 1e-13
    newton_max_iter: int = 64
    tail_cutoff_eps: float = 1e-14

    def __post_init__(self):
        for name in ("quad_rel_tol", "newton_tol", "tail_cutoff_eps"):
            if not getattr(self, name) > 0.0:
                raise InvalidInputError(f"{name} must be positive")
        if self.newton_max_iter < 1:
            raise InvalidInputError("newton_max_iter must be at least 1")


DEFAULT_CONFIG = NumericConfig()


# ---------------------------------------------------------------------------
# saddle point


def saddle_root(t: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Nonzero real root of exp(s) = 1 + t s, with the value 0 at t in {0, 1}.

    Solved as g(s) = s - log(1 + t s) = 0. g is convex with its minimum at
    s* = 1 - 1/t, so the wanted root is bracketed by s* and a point where
    g > 0 (right of s* when t > 1, left of s* when t < 1).
    """
    if t < 0:
        raise InvalidInputError("t must be nonnegative")
    if t == 0.0 or t == 1.0:
        return 0.0

    def g(s):
        return s - math.log1p(t * s)

    def dg(s):
        return 1.0 - t / (1.0 + t * s)

    s_min = 1.0 - 1.0 / t
    if t > 1.0:
        lo, hi = s_min, 2.0 * (math.log1p(t) + math.log(2.0 + t) + 2.0)
        while g(hi) <= 0.0:
            hi *= 2.0
        s = hi
    else:
        lo, hi = -1.0 / t, s_min
        s = 0.5 * (lo + hi)
    # keep the invariant g(lo) > 0 > g(hi) when t < 1, g(lo) < 0 < g(hi) when t > 1
    increasing = t > 1.0
    for _ in range(cfg.newton_max_iter):
        gs = g(s)
        if gs == 0.0:
            return s
        if (gs > 0.0) == increasing:
            hi = s
        else:
            lo = s
        slope = dg(s)
        step = gs / slope if slope != 0.0 else math.inf
        cand = s - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - s) <= cfg.newton_tol * max(1.0, abs(s)):
            return cand
        s = cand
    raise ConvergenceError(f"saddle root for t={t} did not converge in {cfg.newton_max_iter} steps")


def xi_kappa(u: float, kappa: KappaLike, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """max(1, xi(u / kappa)) where xi is the nonzero root of exp(s) = 1 + t s."""
    k = as_kappa(kappa).value
    if not u > 0:
        raise InvalidInputError("u must be positive")
    return max(1.0, saddle_root(u / k, cfg))


def big_i(s: float, order: int = 0, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """I(s) = int_0^s (e^v - 1)/v dv and its first two derivatives."""
    if s < 0:
        raise InvalidInputError("s must be nonnegative")
    if order == 0:
        if s == 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda v: math.expm1(v) / v if v > 0.0 else 1.0,
            0.0, s, epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=200,
        )
        return val
    if order == 1:
        return math.expm1(s) / s if s > 0.0 else 1.0
    if order == 2:
        if s < 1e-4:
            return 0.5 + s / 3.0 + s * s / 8.0 + s ** 3 / 30.0
        return ((s - 1.0) * math.expm1(s) + s) / (s * s)
    raise InvalidInputError("order must be 0, 1 or 2")


@dataclass(frozen=True)
class SaddleParams:
    u: float
    xi: float
    sigma0: float
    sigma2: float
    xi_raw: float


def saddle_params(u: float, kappa: KappaLike, cfg: NumericConfig = DEFAULT_CONFIG) -> SaddleParams:
    k = as_kappa(kappa).value
    if not u > 0:
        raise InvalidInputError("u must be positive")
    raw = saddle_root(u / k, cfg)
    xi = max(1.0, raw)
    return SaddleParams(u=u, xi=xi, sigma0=k * big_i(xi, 0, cfg), sigma2=k * big_i(xi, 2, cfg), xi_raw=raw)


def rho_asymptotic(u: float, kappa: KappaLike, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Saddle-point main term exp(gamma kappa - u xi + sigma0) / sqrt(2 pi sigma2)."""
    k = as_kappa(kappa).value
    if u < 2:
        raise InvalidInputError("asymptotic form requires u >= 2")
    sp = saddle_params(u, k, cfg)
    return math.exp(EULER_GAMMA * k - u * sp.xi + sp.sigma0) / math.sqrt(2.0 * math.pi * sp.sigma2)


def h_envelope(u: float, b_const: float) -> float:
    """h_B(u) = u log(u/B) - u + B for u > B, else 0."""
    if b_const < 1:
        raise InvalidInputError("b_const must be >= 1")
    if u <= b_const:
        return 0.0
    return u * math.log(u / b_const) - u + b_const


# ---------------------------------------------------------------------------
# rho on the first two unit intervals


def _rho_unit(u, k):
    return np.power(u, k - 1.0) / math.gamma(k)


def _rho_second(u, k):
    """Exact rho on [1, 2] from the series of the integrated equation."""
    u = np.asarray(u, dtype=float)
    a = 1.0 - 1.0 / u
    j = np.arange(_SERIES_TERMS - 1, -1, -1, dtype=float)
    terms = np.power(a[..., None], k + j) / (k + j)
    s = terms.sum(axis=-1)
    return np.power(u, k - 1.0) * (1.0 - k * s) / math.gamma(k)


# ---------------------------------------------------------------------------
# tabulation


def _hermite_integral(y0, y1, d0, d1, h, s):
    """Integral over [s, 1] (in units of h) of the cubic Hermite interpolant."""
    def prim(t):
        return (
            y0 * (t ** 4 / 2 - t ** 3 + t)
            + h * d0 * (t ** 4 / 4 - 2 * t ** 3 / 3 + t ** 2 / 2)
            + y1 * (-t ** 4 / 2 + t ** 3)
            + h * d1 * (t ** 4 / 4 - t ** 3 / 3)
        )
    return h * (prim(1.0) - prim(s))


def _limit_slopes(y, d, h):
    """Fritsch-Carlson scaling of endpoint slopes on monotone intervals."""
    d0 = d[:-1].copy()
    d1 = d[1:].copy()
    delta = np.diff(y) / h
    mono = delta != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(mono, d0 / delta, 0.0)
        b = np.where(mono, d1 / delta, 0.0)
    # slopes of the wrong sign on a monotone interval are zeroed
    a_bad = mono & (a < 0)
    b_bad = mono & (b < 0)
    d0[a_bad] = 0.0
    d1[b_bad] = 0.0
    a[a_bad] = 0.0
    b[b_bad] = 0.0
    r2 = a * a + b * b
    over = mono & (r2 > 9.0)
    if over.any():
        tau = 3.0 / np.sqrt(r2[over])
        d0[over] = tau * a[over] * delta[over]
        d1[over] = tau * b[over] * delta[over]
    return d0, d1


@dataclass(frozen=True)
class RhoTable:
    """rho_kappa on the mesh u_i = i / n, 0 <= i <= n * u_max.

    ``values`` holds the finite part of the table: from u = 0 when kappa >= 1
    and from u = step when kappa < 1 (rho is unbounded at 0 then).
    """

    kappa: Kappa
    step: float
    u_max: float
    values: np.ndarray
    gamma_kappa_norm: float
    slopes: np.ndarray = field(repr=False)
    panel_integrals: np.ndarray = field(repr=False)
    tail_integrals: np.ndarray = field(repr=False)
    tail_estimate: float = field(repr=False)
    _rho: np.ndarray = field(repr=False)
    _w2: np.ndarray = field(repr=False)
    _d0: np.ndarray = field(repr=False)
    _d1: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(round(1.0 / self.step))

    @property
    def mesh(self) -> np.ndarray:
        start = 0 if self.kappa.value >= 1.0 else 1
        return np.arange(start, len(self._rho)) * self.step

    @property
    def tail_bound(self) -> float:
        return 10.0 * self.tail_estimate

    # -- evaluation -------------------------------------------------------

    def rho(self, u):
        """rho_kappa at u (scalar or array)."""
        scalar = np.ndim(u) == 0
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any(u > self.u_max * (1 + 1e-15)):
            raise TableRangeError(f"u beyond table range {self.u_max}")
        k = self.kappa.value
        out = np.zeros_like(u)
        m = u == 0.0
        if m.any():
            out[m] = math.inf if k < 1 else (1.0 if k == 1 else 0.0)
        m = (u > 0) & (u <= 1)
        out[m] = _rho_unit(u[m], k)
        m = (u > 1) & (u <= 2)
        out[m] = _rho_second(u[m], k)
        m = (u > 2) & (u <= 3)
        if m.any():
            out[m] = [self._rho_third(x) for x in u[m]]
        m = u > 3
        if m.any():
            out[m] = self._hermite(u[m])
        return float(out[0]) if scalar else out

    def __call__(self, u):
        return self.rho(u)

    def _locate(self, x):
        n = self.n
        i = np.floor(x * n).astype(np.int64)
        i = np.clip(i, 0, len(self._rho) - 2)
        s = x * n - i
        return i, s

    def _hermite(self, x):
        i, s = self._locate(x)
        h = self.step
        y0, y1 = self._rho[i], self._rho[i + 1]
        d0, d1 = self._d0[i], self._d1[i]
        s2, s3 = s * s, s * s * s
        return (
            (2 * s3 - 3 * s2 + 1) * y0
            + (s3 - 2 * s2 + s) * h * d0
            + (-2 * s3 + 3 * s2) * y1
            + (s3 - s2) * h * d1
        )

    def _rho_third(self, x: float) -> float:
        """rho on (2, 3] from the integrated equation with the exact series inside."""
        n = self.n
        k = self.kappa.value
        i = int(math.floor(x * n))
        if i * self.step == x or i == 3 * n:
            return float(self._rho[i])
        a = i / n
        if i == 2 * n:
            j, _ = integrate.quad(
                lambda t: t ** (-k) * float(_rho_second(t - 1.0, k)),
                a, x, epsabs=0.0, epsrel=1e-13, limit=200,
            )
        else:
            t = a + (x - a) * _GL_NODES
            j = (x - a) * float(np.dot(_GL_WEIGHTS, t ** (-k) * _rho_second(t - 1.0, k)))
        return (self._w2[i - 2 * n] - k * j) / x ** (1.0 - k)

    # -- integrals ----------------------------------------------------------

    def _partial_to_next(self, x: float) -> float:
        """Integral of rho from x to the next mesh point at or above x."""
        n = self.n
        k = self.kappa.value
        i = int(math.ceil(x * n - 1e-12))
        right = i / n
        if right <= x:
            return 0.0
        if x <= 1.0:
            return (right ** k - x ** k) / math.gamma(k + 1.0)
        if x <= 3.0:
            # u rho(u) = kappa * int_{u-1}^u rho links each panel to the one a unit below
            lower = self._partial_to_next(x - 1.0)
            return (right * self._rho[i] - x * self.rho(x)) / k + lower
        j, s = self._locate(np.array([x]))
        j = int(j[0])
        return float(_hermite_integral(self._rho[j], self._rho[j + 1], self._d0[j], self._d1[j],
                                       self.step, float(s[0])))

    def tail_integral(self, u: float) -> float:
        """Integral of rho over [u, u_max] (without the estimate beyond u_max)."""
        if u < 0:
            raise InvalidInputError("u must be nonnegative")
        if u > self.u_max:
            raise TableRangeError(f"u beyond table range {self.u_max}")
        n = self.n
        i = int(math.ceil(u * n - 1e-12))
        return self._partial_to_next(u) + float(self.tail_integrals[i])


def build_rho_table(kappa: KappaLike, u_max: float = 64.0, step: float = 1.0 / 256,
                    cfg: NumericConfig = DEFAULT_CONFIG) -> RhoTable:
    """Tabulate rho_kappa on a uniform mesh.

    Args:
        kappa: convolution parameter.
        u_max: right end of the table; rounded up to an integer.
        step: mesh spacing; replaced by 1/ceil(1/step) so that unit shifts
            land on mesh points.
        cfg: tolerances.

    Returns:
        An immutable RhoTable.
    """
    kap = as_kappa(kappa)
    k = kap.value
    if not step > 0 or step > 1.0 / 64 + 1e-15:
        raise InvalidInputError("step must be positive and at most 1/64")
    if not u_max >= 1.0:
        raise InvalidInputError("u_max must be at least 1")
    n = int(math.ceil(1.0 / step - 1e-9))
    h = 1.0 / n
    blocks = int(math.ceil(u_max - 1e-12))
    top = blocks * n
    u = np.arange(top + 1, dtype=float) / n
    gk = math.gamma(k)
    gk1 = math.gamma(k + 1.0)

    rho = np.zeros(top + 1)
    d = np.zeros(top + 1)
    q = np.zeros(top + 1)  # q[i] = integral of rho over [u_{i-1}, u_i]

    # block 0: closed form
    rho[0] = math.inf if k < 1 else (1.0 if k == 1 else 0.0)
    rho[1:n + 1] = _rho_unit(u[1:n + 1], k)
    d[1:n + 1] = (k - 1.0) * np.power(u[1:n + 1], k - 2.0) / gk
    q[1:n + 1] = np.diff(np.power(u[:n + 1], k)) / gk1

    def link_panels(lo, hi):
        # q_i = (u_i rho_i - u_{i-1} rho_{i-1}) / kappa + q_{i-n}
        idx = np.arange(lo, hi + 1)
        q[idx] = (u[idx] * rho[idx] - u[idx - 1] * rho[idx - 1]) / k + q[idx - n]

    def dde_slopes(lo, hi):
        idx = np.arange(lo, hi + 1)
        d[idx] = -((1.0 - k) * rho[idx] + k * rho[idx - n]) / u[idx]

    # block 1: exact series
    if blocks >= 2 or top > n:
        hi1 = min(2 * n, top)
        rho[n + 1:hi1 + 1] = _rho_second(u[n + 1:hi1 + 1], k)
        dde_slopes(n + 1, hi1)
        link_panels(n + 1, hi1)

    # block 2: explicit integrated form with the exact series for rho(t - 1)
    w2 = np.zeros(n + 1)
    if blocks >= 3:
        lefts = u[2 * n:3 * n]
        t = lefts[:, None] + h * _GL_NODES[None, :]
        vals = np.power(t, -k) * _rho_second(t - 1.0, k)
        jint = h * (vals @ _GL_WEIGHTS)
        jint[0], _ = integrate.quad(
            lambda s: s ** (-k) * float(_rho_second(s - 1.0, k)),
            2.0, 2.0 + h, epsabs=0.0, epsrel=1e-13, limit=200,
        )
        w2[0] = 2.0 ** (1.0 - k) * rho[2 * n]
        w2[1:] = w2[0] - k * np.cumsum(jint)
        rho[2 * n + 1:3 * n + 1] = w2[1:] / np.power(u[2 * n + 1:3 * n + 1], 1.0 - k)
        dde_slopes(2 * n + 1, 3 * n)
        link_panels(2 * n + 1, 3 * n)

    # blocks >= 3: u rho(u) = kappa * int_{u-1}^u rho, implicit Hermite panel.
    # All terms are positive, so relative accuracy does not degrade with u.
    for b in range(3, blocks):
        base = b * n
        prev = q[base - n + 1:base + 1]
        suffix = np.cumsum(prev[::-1])[::-1]  # suffix[j] = sum(prev[j:])
        head = 0.0
        for i in range(base + 1, base + n + 1):
            r = i - base
            s_win = (suffix[r] if r < n else 0.0) + head
            ui = u[i]
            rn = rho[i - n]
            num = k * (s_win + 0.5 * h * rho[i - 1] + h * h * d[i - 1] / 12.0
                       + h * h * k * rn / (12.0 * ui))
            den = ui - 0.5 * k * h - k * h * h * (1.0 - k) / (12.0 * ui)
            ri = num / den
            rho[i] = ri
            di = -((1.0 - k) * ri + k * rn) / ui
            d[i] = di
            qi = 0.5 * h * (rho[i - 1] + ri) + h * h * (d[i - 1] - di) / 12.0
            q[i] = qi
            head += qi

    if not np.all(np.isfinite(rho[1:])) or np.any(rho[1:] < 0):
        raise ConvergenceError("rho table produced non-finite or negative values")

    tail = np.zeros(top + 1)
    tail[:-1] = np.cumsum(q[:0:-1])[::-1]
    u_top = float(blocks)
    est = float(rho[top]) / xi_kappa(u_top, kap, cfg)
    norm = float(tail[0]) + est

    d_lo, d_hi = _limit_slopes(np.where(np.isfinite(rho), rho, 0.0), d, h)
    start = 0 if k >= 1 else 1
    arrays = [rho, d, q, tail, w2, d_lo, d_hi]
    for a in arrays:
        a.setflags(write=False)
    values = rho[start:]
    slopes = d[start:]
    return RhoTable(
        kappa=kap, step=h, u_max=u_top, values=values, gamma_kappa_norm=norm,
        slopes=slopes, panel_integrals=q, tail_integrals=tail, tail_estimate=est,
        _rho=rho, _w2=w2, _d0=d_lo, _d1=d_hi,
    )


@lru_cache(maxsize=32)
def default_table(kappa: float, u_max: float = 64.0, step: float = 1.0 / 256) -> RhoTable:
    """Cached table with the default configuration."""
    return build_rho_table(float(kappa), u_max, step)


def rho_kappa(u, table: RhoTable):
    return table.rho(u)


def lambda_kappa(u: float, rho: RhoTable, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """exp(-gamma kappa) * int_u^infinity rho_kappa.

    On [0, 1] the head integral is explicit and the total mass is exactly
    exp(gamma kappa), so lambda = 1 - exp(-gamma kappa) u^kappa / Gamma(kappa + 1)
    there; beyond 1 the tabulated tail integral is used (relative accuracy for
    small values).
    """
    if u < 0:
        raise InvalidInputError("u must be nonnegative")
    k = rho.kappa.value
    if u <= 1.0:
        return 1.0 - math.exp(-EULER_GAMMA * k) * u ** k / math.gamma(k + 1.0)
    head = rho.tail_integral(u)
    total = head + rho.tail_estimate
    if rho.tail_bound > cfg.tail_cutoff_eps * total:
        raise TableRangeError(
            f"tail beyond u_max={rho.u_max} not negligible at u={u}; extend the table"
        )
    return math.exp(-EULER_GAMMA * k) * total


def j_kappa(u: float, rho: RhoTable, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """exp(-gamma kappa) * int_0^u rho_kappa = 1 - lambda_kappa(u)."""
    if u < 0:
        raise InvalidInputError("u must be nonnegative")
    if u <= 1.0:
        k = rho.kappa.value
        return math.exp(-EULER_GAMMA * k) * u ** k / math.gamma(k + 1.0)
    return 1.0 - lambda_kappa(u, rho, cfg)


# ---------------------------------------------------------------------------
# adjoint solution


def ein(v):
    """Ein(v) = int_0^v (1 - e^{-w})/w dw, for v >= 0."""
    scalar = np.ndim(v) == 0
    v = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty_like(v)
    small = v < 1.0
    if small.any():
        x = v[small]
        acc = np.zeros_like(x)
        term = np.ones_like(x)
        for j in range(1, 30):
            term = term * (-x) / j
            acc -= term / j
        out[small] = acc
    big = ~small
    if big.any():
        x = v[big]
        out[big] = special.exp1(x) + np.log(x) + EULER_GAMMA
    return float(out[0]) if scalar else out


def mu_kappa(u: float, kappa: KappaLike, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """int_0^infinity exp(-u v + kappa Ein(v)) dv, truncated with a certified tail."""
    k = as_kappa(kappa).value
    if not u > 0:
        raise InvalidInputError("u must be positive")

    def f(v):
        return math.exp(-u * v + k * float(ein(v)))

    def tail(V):
        # Ein(v) <= log v + gamma + E1(1) for v >= 1
        c = math.exp(k * (EULER_GAMMA + 0.2193839343955203))
        return c * special.gammaincc(k + 1.0, u * V) * math.gamma(k + 1.0) / u ** (k + 1.0)

    V = max(1.0, (k + 40.0) / u)
    while True:
        pieces = [0.0, min(V, 1.0 / u)]
        if V > pieces[-1]:
            pieces.append(V)
        val = 0.0
        for a, b in zip(pieces[:-1], pieces[1:]):
            part, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=400)
            val += part
        if tail(V) <= cfg.tail_cutoff_eps * val:
            return val
        V *= 1.5


@dataclass(frozen=True)
class AdjointCheck:
    lhs: float
    rhs: float

    @property
    def relative(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.lhs)


def adjoint_identity(u: float, table: RhoTable, cfg: NumericConfig = DEFAULT_CONFIG) -> AdjointCheck:
    """Both sides of u lambda(u) mu(u) = kappa int_{u-1}^u lambda(v) mu(v+1) dv (u > 0).

    lambda_kappa is taken equal to 1 on v <= 0.
    """
    if not u > 0:
        raise InvalidInputError("u must be positive")
    k = table.kappa.value

    def lam(v):
        return 1.0 if v <= 0.0 else lambda_kappa(v, table, cfg)

    def integrand(v):
        return lam(v) * mu_kappa(v + 1.0, k, cfg)

    lo = u - 1.0
    cuts = [lo] + [float(c) for c in range(math.floor(lo) + 1, math.ceil(u))] + [u]
    parts = [integrate.quad(integrand, a, b, epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=200)[0]
             for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    lhs = u * lam(u) * mu_kappa(u, k, cfg)
    return AdjointCheck(lhs=lhs, rhs=k * math.fsum(parts))
