"""Declarative nonnegative multiplicative functions.

A ``MultiplicativeSpec`` fixes f on prime powers. Every kind supplies exact
(closed-form or provably stabilized) local series, which is what the Euler
products and the Rankin bound rely on.

JSON schema (unknown keys are rejected)::

    {"kind": "tau_kappa", "kappa": 1.5}
    {"kind": "squarefree_uniform", "c": 2.0}
    {"kind": "poly_density", "poly_coeffs": [-1, 0, 1]}          # ascending
    {"kind": "table", "entries": {"2^1": 0.5, "3": 1.0},
     "default_prime": 1.0, "default_higher": 0.0}
    {"kind": "sieve_density", "entries": {...}}                   # default 0

plus the optional common keys "eta" (default 0.25), "series_cutoff"
(default 40) and "excluded" (list of primes on which f vanishes).
"""

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from ..errors import InadmissibleSpecError, InvalidInputError
from .primes import factorize

KINDS = ("tau_kappa", "squarefree_uniform", "poly_density", "table", "sieve_density")
_COMMON_KEYS = {"kind", "eta", "series_cutoff", "excluded"}
_KIND_KEYS = {
    "tau_kappa": {"kappa"},
    "squarefree_uniform": {"c"},
    "poly_density": {"poly_coeffs"},
    "table": {"entries", "default_prime", "default_higher"},
    "sieve_density": {"entries"},
}


def _binom_tau(kappa: float, nu: int) -> float:
    """binomial(kappa + nu - 1, nu)."""
    val = 1.0
    for j in range(1, nu + 1):
        val *= (kappa + j - 1.0) / j
    return val


def _parse_pp_key(key: str) -> Tuple[int, int]:
    if "^" in key:
        p, nu = key.split("^", 1)
        return int(p), int(nu)
    return int(key), 1


def _geometric_tail(x: float, start: int) -> float:
    """sum_{nu >= start} x^nu."""
    return x ** start / (1.0 - x)


def _weighted_geometric_tail(x: float, start: int) -> float:
    """sum_{nu >= start} nu x^nu."""
    return x ** start * (start - (start - 1) * x) / (1.0 - x) ** 2


@lru_cache(maxsize=4096)
def _poly_profile(coeffs: Tuple[int, ...], p: int, cutoff: int) -> Tuple[Tuple[int, ...], int]:
    """rho(p^nu; G) for nu = 0..V and the level V after which it is constant."""
    from ..sieve.poly import discriminant_valuation_bound, rho_poly

    stab = discriminant_valuation_bound(coeffs, p)
    if stab > cutoff:
        raise InadmissibleSpecError(
            f"root counts of G modulo powers of {p} stabilize only after level {stab} > series_cutoff"
        )
    vals = [1]
    for nu in range(1, stab + 3):
        vals.append(rho_poly(p ** nu, coeffs, allow_vanishing=True))
    if not (vals[stab] == vals[stab + 1] == vals[stab + 2]):
        raise InadmissibleSpecError(f"root counts of G modulo powers of {p} did not stabilize")
    return tuple(vals[: stab + 1]), stab


@dataclass(frozen=True)
class MultiplicativeSpec:
    kind: str
    kappa: Optional[float] = None
    c: Optional[float] = None
    poly_coeffs: Optional[Tuple[int, ...]] = None
    entries: Tuple[Tuple[Tuple[int, int], float], ...] = ()
    default_prime: float = 0.0
    default_higher: float = 0.0
    eta: float = 0.25
    series_cutoff: int = 40
    excluded: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown kind {self.kind!r}")
        if not 0.0 < self.eta < 0.5:
            raise InvalidInputError("eta must lie in (0, 1/2)")
        if self.series_cutoff < 2:
            raise InvalidInputError("series_cutoff must be >= 2")
        if self.kind == "tau_kappa":
            if self.kappa is None or not self.kappa > 0:
                raise InvalidInputError("tau_kappa needs kappa > 0")
        elif self.kind == "squarefree_uniform":
            if self.c is None or not self.c >= 0:
                raise InvalidInputError("squarefree_uniform needs c >= 0")
        elif self.kind == "poly_density":
            if not self.poly_coeffs or not any(self.poly_coeffs):
                raise InvalidInputError("poly_density needs a nonzero integer polynomial")
            object.__setattr__(self, "poly_coeffs", tuple(int(a) for a in self.poly_coeffs))
            self._check_poly_squarefree()
        else:
            if self.default_prime < 0 or self.default_higher < 0:
                raise InvalidInputError("defaults must be nonnegative")
            for (p, nu), v in self.entries:
                if nu < 1 or p < 2 or len(factorize(p)) != 1 or factorize(p).get(p) != 1:
                    raise InvalidInputError(f"invalid prime power key {p}^{nu}")
                if not v >= 0:
                    raise InvalidInputError("table values must be nonnegative")
        object.__setattr__(self, "excluded", frozenset(int(p) for p in self.excluded))
        object.__setattr__(self, "_table", {key: float(v) for key, v in self.entries})

    def _check_poly_squarefree(self):
        from ..sieve.poly import is_squarefree_poly

        if not is_squarefree_poly(self.poly_coeffs):
            raise InadmissibleSpecError("poly_density requires a squarefree polynomial")

    # -- constructors -------------------------------------------------------

    @classmethod
    def tau_kappa(cls, kappa: float, **kw) -> "MultiplicativeSpec":
        return cls(kind="tau_kappa", kappa=float(kappa), **kw)

    @classmethod
    def squarefree_uniform(cls, c: float, **kw) -> "MultiplicativeSpec":
        return cls(kind="squarefree_uniform", c=float(c), **kw)

    @classmethod
    def poly_density(cls, coeffs: Iterable[int], **kw) -> "MultiplicativeSpec":
        return cls(kind="poly_density", poly_coeffs=tuple(int(a) for a in coeffs), **kw)

    @classmethod
    def table(cls, entries: Mapping[Tuple[int, int], float], default_prime: float = 0.0,
              default_higher: float = 0.0, **kw) -> "MultiplicativeSpec":
        items = tuple(sorted((tuple(k), float(v)) for k, v in entries.items()))
        return cls(kind="table", entries=items, default_prime=float(default_prime),
                   default_higher=float(default_higher), **kw)

    @classmethod
    def sieve_density(cls, entries: Mapping[Tuple[int, int], float], **kw) -> "MultiplicativeSpec":
        items = tuple(sorted((tuple(k), float(v)) for k, v in entries.items()))
        return cls(kind="sieve_density", entries=items, **kw)

    # -- basic properties ---------------------------------------------------

    @property
    def is_squarefree(self) -> bool:
        """True when f vanishes on every p^nu with nu >= 2."""
        if self.kind == "squarefree_uniform":
            return True
        if self.kind in ("table", "sieve_density"):
            return self.default_higher == 0.0 and all(v == 0.0 for (p, nu), v in self.entries if nu >= 2)
        return False

    @property
    def natural_kappa(self) -> Optional[float]:
        """The mean value of f on primes, when the kind determines one."""
        if self.kind == "tau_kappa":
            return self.kappa
        if self.kind == "squarefree_uniform":
            return self.c
        if self.kind == "table" and not self.entries:
            return self.default_prime
        return None

    def special_primes(self) -> Tuple[int, ...]:
        """Primes where f departs from the generic rule of its kind."""
        ps = set(self.excluded)
        if self.kind in ("table", "sieve_density"):
            ps.update(p for (p, _), _ in self.entries)
        elif self.kind == "poly_density":
            from ..sieve.poly import bad_primes

            ps.update(bad_primes(self.poly_coeffs))
        return tuple(sorted(ps))

    # -- values -------------------------------------------------------------

    def local(self, p: int, nu: int) -> float:
        """f(p^nu)."""
        if nu == 0:
            return 1.0
        if p in self.excluded:
            return 0.0
        k = self.kind
        if k == "tau_kappa":
            return _binom_tau(self.kappa, nu)
        if k == "squarefree_uniform":
            return self.c if nu == 1 else 0.0
        if k == "poly_density":
            vals, stab = _poly_profile(self.poly_coeffs, p, self.series_cutoff)
            return float(vals[min(nu, stab)])
        default = self.default_prime if nu == 1 else self.default_higher
        return self._table.get((p, nu), default)

    def _table_series(self, p: int, x: float, weight_nu: bool, start: int) -> float:
        """sum_{nu >= start} (nu or 1) f(p^nu) x^nu for the table kinds."""
        wt = (lambda nu: nu) if weight_nu else (lambda nu: 1)
        listed = {nu: v for (q, nu), v in self.entries if q == p and nu >= start}
        total = sum(wt(nu) * v * x ** nu for nu, v in listed.items())
        if start <= 1 and 1 not in listed:
            total += self.default_prime * x
        if self.default_higher:
            lo = max(start, 2)
            geo = _weighted_geometric_tail(x, lo) if weight_nu else _geometric_tail(x, lo)
            geo -= sum(wt(nu) * x ** nu for nu in listed if nu >= lo)
            total += self.default_higher * geo
        return total

    def _poly_series(self, p: int, x: float, weight_nu: bool, start: int) -> float:
        vals, stab = _poly_profile(self.poly_coeffs, p, self.series_cutoff)
        wt = (lambda nu: nu) if weight_nu else (lambda nu: 1)
        total = sum(wt(nu) * vals[nu] * x ** nu for nu in range(start, stab + 1))
        tail_start = max(stab + 1, start)
        geo = _weighted_geometric_tail(x, tail_start) if weight_nu else _geometric_tail(x, tail_start)
        return total + vals[stab] * geo

    def local_sums(self, p: int) -> Tuple[float, float]:
        """(sum_{nu>=0} f(p^nu)/p^nu, sum_{nu>=1} nu f(p^nu)/p^nu)."""
        if p in self.excluded:
            return 1.0, 0.0
        x = 1.0 / p
        k = self.kind
        if k == "tau_kappa":
            s0 = math.exp(-self.kappa * math.log1p(-x))
            return s0, self.kappa * x * s0 / (1.0 - x)
        if k == "squarefree_uniform":
            return 1.0 + self.c * x, self.c * x
        if k == "poly_density":
            return 1.0 + self._poly_series(p, x, False, 1), self._poly_series(p, x, True, 1)
        return 1.0 + self._table_series(p, x, False, 1), self._table_series(p, x, True, 1)

    def log_local(self, p: int) -> float:
        """log of the local factor sum_{nu>=0} f(p^nu)/p^nu."""
        if p in self.excluded:
            return 0.0
        if self.kind == "tau_kappa":
            return -self.kappa * math.log1p(-1.0 / p)
        if self.kind == "squarefree_uniform":
            return math.log1p(self.c / p)
        x = 1.0 / p
        if self.kind == "poly_density":
            return math.log1p(self._poly_series(p, x, False, 1))
        return math.log1p(self._table_series(p, x, False, 1))

    def higher_series(self, p: int, sigma: float) -> float:
        """sum_{nu>=2} f(p^nu) p^(-nu sigma)."""
        if p in self.excluded:
            return 0.0
        x = p ** (-sigma)
        if x >= 1.0:
            if self.is_squarefree:
                return 0.0
            raise InadmissibleSpecError(f"local series at p={p} diverges at sigma={sigma}")
        k = self.kind
        if k == "squarefree_uniform":
            return 0.0
        if k == "tau_kappa":
            kap = self.kappa
            if x >= 0.5:
                return math.exp(-kap * math.log1p(-x)) - 1.0 - kap * x
            total, term, nu = 0.0, kap * x, 1
            while True:
                term *= (kap + nu) / (nu + 1) * x
                nu += 1
                total += term
                if term <= 1e-18 * total or nu > 4000:
                    return total
        if k == "poly_density":
            return self._poly_series(p, x, False, 2)
        return self._table_series(p, x, False, 2)

    def higher_tail_bound(self, p_cut: float, sigma: float) -> float:
        """Upper bound for sum over primes p > p_cut of higher_series(p, sigma)."""
        if self.is_squarefree:
            return 0.0
        if 2.0 * sigma <= 1.0:
            raise InadmissibleSpecError("sum over primes of p^(-2 sigma) diverges for sigma <= 1/2")
        P = max(2.0, float(p_cut))
        x0 = P ** (-sigma)
        k = self.kind
        if k == "tau_kappa":
            kap = self.kappa
            # sum_{nu>=2} c_nu x^nu = x^2 H(x) with H increasing
            h = (math.exp(-kap * math.log1p(-x0)) - 1.0 - kap * x0) / (x0 * x0)
        elif k == "poly_density":
            deg = len(self.poly_coeffs) - 1
            while deg > 0 and self.poly_coeffs[deg] == 0:
                deg -= 1
            h = max(deg, 1) / (1.0 - x0)
        else:
            h = self.default_higher / (1.0 - x0)
        bound = h * P ** (1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0)
        bound += sum(self.higher_series(p, sigma) for p in self.special_primes() if p > P)
        return bound

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> Dict:
        d: Dict = {"kind": self.kind}
        if self.kind == "tau_kappa":
            d["kappa"] = self.kappa
        elif self.kind == "squarefree_uniform":
            d["c"] = self.c
        elif self.kind == "poly_density":
            d["poly_coeffs"] = list(self.poly_coeffs)
        else:
            d["entries"] = {f"{p}^{nu}": v for (p, nu), v in self.entries}
            if self.kind == "table":
                d["default_prime"] = self.default_prime
                d["default_higher"] = self.default_higher
        d["eta"] = self.eta
        d["series_cutoff"] = self.series_cutoff
        if self.excluded:
            d["excluded"] = sorted(self.excluded)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "MultiplicativeSpec":
        if not isinstance(d, Mapping) or "kind" not in d:
            raise InvalidInputError("spec must be an object with a 'kind' key")
        kind = d["kind"]
        if kind not in _KIND_KEYS:
            raise InvalidInputError(f"unknown kind {kind!r}")
        unknown = set(d) - _COMMON_KEYS - _KIND_KEYS[kind]
        if unknown:
            raise InvalidInputError(f"unknown keys for {kind}: {sorted(unknown)}")
        kw = {}
        if "eta" in d:
            kw["eta"] = float(d["eta"])
        if "series_cutoff" in d:
            kw["series_cutoff"] = int(d["series_cutoff"])
        if "excluded" in d:
            kw["excluded"] = frozenset(int(p) for p in d["excluded"])
        try:
            if kind == "tau_kappa":
                return cls.tau_kappa(float(d["kappa"]), **kw)
            if kind == "squarefree_uniform":
                return cls.squarefree_uniform(float(d["c"]), **kw)
            if kind == "poly_density":
                return cls.poly_density([int(a) for a in d["poly_coeffs"]], **kw)
            entries = {_parse_pp_key(str(key)): float(v) for key, v in d.get("entries", {}).items()}
            if kind == "table":
                return cls.table(entries, d.get("default_prime", 0.0), d.get("default_higher", 0.0), **kw)
            return cls.sieve_density(entries, **kw)
        except KeyError as exc:
            raise InvalidInputError(f"missing key {exc} for kind {kind}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "MultiplicativeSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"malformed JSON: {exc}") from None
        return cls.from_dict(d)


ONE = MultiplicativeSpec.tau_kappa(1.0)


def f_value(spec: MultiplicativeSpec, n: int) -> float:
    """f(n) as the product of f(p^nu) over p^nu || n."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    val = 1.0
    for p, nu in factorize(n).items():
        val *= spec.local(p, nu)
        if val == 0.0:
            break
    return val


def restricted(spec: MultiplicativeSpec, m: int) -> MultiplicativeSpec:
    """A MultiplicativeSpec for f_m, which agrees with f on integers coprime to m and vanishes elsewhere."""
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    if m == 1:
        return spec
    return replace(spec, excluded=spec.excluded | frozenset(factorize(m)))
