"""Selberg's upper-bound sieve by residue classes modulo prime powers.

A sieving problem is a finite multiset A of integers together with, for each
prime power p^nu (p <= z), a set W(p^nu) of residues mod p^nu to be removed.
For d > 1, a lies in W(d) when a mod p^nu is in W(p^nu) for every p^nu || d.
The density w and the mass X describe the counts:

    #{a in A : a in W(d)} = w(d) X / d + r_d.
"""

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..arith.multiplicative import MultiplicativeSpec
from ..arith.primes import factorize, primes_up_to
from ..arith.sums import psi_f
from ..errors import BudgetExceededError, InvalidInputError
from .poly import _normalize

PrimePower = Tuple[int, int]
A_BUDGET = 10 ** 7


def _check_prime_power(key) -> PrimePower:
    p, nu = int(key[0]), int(key[1])
    if nu < 1 or p < 2 or factorize(p) != {p: 1}:
        raise InvalidInputError(f"{key} is not a prime power (p, nu)")
    return p, nu


@dataclass(frozen=True)
class ResidueSystem:
    """The sets W(p^nu), keyed by (p, nu); residues are reduced mod p^nu."""

    z: float
    entries: Mapping[PrimePower, FrozenSet[int]]

    def __post_init__(self):
        if not self.z >= 2:
            raise InvalidInputError("z must be >= 2")
        clean: Dict[PrimePower, FrozenSet[int]] = {}
        for key, res in self.entries.items():
            p, nu = _check_prime_power(key)
            if p > self.z:
                raise InvalidInputError(f"W({p}^{nu}) given for a prime above z")
            q = p ** nu
            clean[(p, nu)] = frozenset(int(r) % q for r in res)
        object.__setattr__(self, "entries", clean)
        self._check_disjoint()

    def _check_disjoint(self):
        by_prime: Dict[int, List[int]] = {}
        for p, nu in self.entries:
            by_prime.setdefault(p, []).append(nu)
        for p, nus in by_prime.items():
            nus.sort()
            for i, mu in enumerate(nus):
                low = self.entries[(p, mu)]
                if not low:
                    continue
                q = p ** mu
                for nu in nus[i + 1:]:
                    if any(r % q in low for r in self.entries[(p, nu)]):
                        raise InvalidInputError(f"W({p}^{mu}) and W({p}^{nu}) overlap")

    def get(self, p: int, nu: int) -> FrozenSet[int]:
        return self.entries.get((p, nu), frozenset())

    def contains(self, a: int, d: int) -> bool:
        """Whether a lies in W(d)."""
        for p, nu in factorize(d).items():
            if a % p ** nu not in self.get(p, nu):
                return False
        return True


@dataclass(frozen=True)
class DensityFunction:
    """w(p^nu) >= 0 on finitely many prime powers, zero elsewhere."""

    w: Mapping[PrimePower, float]

    def __post_init__(self):
        clean = {}
        for key, v in self.w.items():
            p, nu = _check_prime_power(key)
            v = float(v)
            if not v >= 0.0:
                raise InvalidInputError(f"w({p}^{nu}) must be >= 0")
            if v > 0.0:
                clean[(p, nu)] = v
        object.__setattr__(self, "w", clean)
        for p in self.primes:
            if self.theta(p, self.top(p)) <= 0.0:
                raise InvalidInputError(f"sum of w(p^nu)/p^nu reaches 1 at p = {p}")

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(sorted({p for p, _ in self.w}))

    def top(self, p: int) -> int:
        """Largest nu with w(p^nu) > 0 (0 if none)."""
        return max((nu for q, nu in self.w if q == p), default=0)

    def value(self, p: int, nu: int) -> float:
        return self.w.get((p, nu), 0.0)

    def of(self, d: int) -> float:
        """w(d), multiplicatively."""
        out = 1.0
        for p, nu in factorize(d).items():
            out *= self.value(p, nu)
        return out

    def theta(self, p: int, nu: int) -> float:
        """1 - sum_{1<=mu<=nu} w(p^mu)/p^mu."""
        if nu < 0:
            raise InvalidInputError("nu must be >= 0")
        if nu == 0:
            return 1.0
        s = math.fsum(self.value(p, mu) / p ** mu for mu in range(1, nu + 1))
        out = 1.0 - s
        if out <= 0.0:
            raise InvalidInputError(f"theta({p}^{nu}) = {out} <= 0")
        return out

    def g_val(self, p: int, nu: int) -> float:
        if nu < 1:
            raise InvalidInputError("nu must be >= 1")
        t0, t1 = self.theta(p, nu - 1), self.theta(p, nu)
        return (t0 - t1) * t1 / t0

    def t_star(self, p: int, mu: int, nu: int) -> float:
        """t*(p^mu, p^nu) for mu >= 1."""
        if mu < 1 or nu < 0:
            raise InvalidInputError("need mu >= 1 and nu >= 0")
        if nu > mu:
            return 0.0
        if nu == mu:
            return 1.0
        t0 = self.theta(p, mu - 1)
        ratio = (t0 - self.theta(p, mu)) / t0
        return -ratio if nu == 0 else ratio

    def sieve_f(self) -> MultiplicativeSpec:
        """f(p^nu) = p^nu/theta(p^nu) - p^nu/theta(p^(nu-1)), zero past the support."""
        entries = {}
        for p in self.primes:
            for nu in range(1, self.top(p) + 1):
                v = p ** nu * (1.0 / self.theta(p, nu) - 1.0 / self.theta(p, nu - 1))
                if v != 0.0:
                    entries[(p, nu)] = v
        return MultiplicativeSpec.sieve_density(entries)


def theta(density: DensityFunction, p: int, nu: int) -> float:
    return density.theta(p, nu)


def g_val(density: DensityFunction, p: int, nu: int) -> float:
    return density.g_val(p, nu)


def t_star(density: DensityFunction, m: int, d: int) -> float:
    """Two-variable multiplicative extension of t*(p^mu, p^nu)."""
    fm, fd = factorize(m), factorize(d)
    if any(p not in fm for p in fd):
        return 0.0
    out = 1.0
    for p, mu in fm.items():
        out *= density.t_star(p, mu, fd.get(p, 0))
    return out


def epsilon(d: int, d_prime: int) -> int:
    """1 iff for every p the exponents of p in d and d' are equal or one of them is 0."""
    if d < 1 or d_prime < 1:
        raise InvalidInputError("arguments must be >= 1")
    fa, fb = factorize(d), factorize(d_prime)
    for p in set(fa) & set(fb):
        if fa[p] != fb[p]:
            return 0
    return 1


def _lattice(components: Mapping[int, Sequence[int]], bound: float) -> Iterator[Tuple[int, Tuple[PrimePower, ...]]]:
    """All m <= bound built from at most one allowed p^nu per prime, with their factorization."""
    primes = sorted(components)

    def walk(i: int, m: int, parts: Tuple[PrimePower, ...]):
        if i == len(primes):
            yield m, parts
            return
        yield from walk(i + 1, m, parts)
        p = primes[i]
        for nu in components[p]:
            mm = m * p ** nu
            if mm <= bound:
                yield from walk(i + 1, mm, parts + ((p, nu),))

    yield from walk(0, 1, ())


@dataclass(frozen=True)
class SieveReport:
    main_term: float
    remainder: float
    bound: float
    brute_count: Optional[int]
    weights_max_abs: float
    x_mass: float
    d_cutoff: float
    z: float

    @property
    def ratio(self) -> float:
        """bound / brute_count (inf for an empty sifted set, nan when not counted)."""
        if self.brute_count is None:
            return float("nan")
        if self.brute_count == 0:
            return float("inf") if self.bound > 0 else float("nan")
        return self.bound / self.brute_count


@dataclass(frozen=True)
class SieveInstance:
    """A sieving problem with explicit A or A = {G(n) : n in I}.

    Only primes in ``prime_set`` (all primes when None) up to z take part; the
    W-sets and densities of other primes are dropped, which is harmless since
    they play no role in S(A, P; z).
    """

    residues: ResidueSystem
    density: DensityFunction
    d_cutoff: float
    x_mass: float
    a_values: Optional[Tuple[int, ...]] = None
    interval: Optional[Tuple[int, int]] = None
    poly_coeffs: Optional[Tuple[int, ...]] = None
    prime_set: Optional[FrozenSet[int]] = None
    remainders: Optional[Mapping[int, float]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.d_cutoff > 1:
            raise InvalidInputError("D must be > 1")
        if not self.x_mass >= 0:
            raise InvalidInputError("X must be >= 0")
        if (self.a_values is None) == (self.interval is None):
            raise InvalidInputError("give exactly one of a_values or interval")
        if self.interval is not None:
            lo, hi = (int(t) for t in self.interval)
            if hi < lo:
                raise InvalidInputError("empty interval")
            object.__setattr__(self, "interval", (lo, hi))
            coeffs = _normalize(self.poly_coeffs if self.poly_coeffs is not None else (0, 1))
            object.__setattr__(self, "poly_coeffs", coeffs)
        else:
            object.__setattr__(self, "a_values", tuple(int(a) for a in self.a_values))
        if self.size > A_BUDGET:
            raise BudgetExceededError(f"|A| = {self.size} exceeds {A_BUDGET}")
        z = self.residues.z
        keep = (lambda p: p <= z) if self.prime_set is None else (lambda p: p <= z and p in self.prime_set)
        res = {k: v for k, v in self.residues.entries.items() if keep(k[0])}
        dens = {k: v for k, v in self.density.w.items() if keep(k[0])}
        object.__setattr__(self, "residues", ResidueSystem(z, res))
        object.__setattr__(self, "density", DensityFunction(dens))

    @classmethod
    def explicit(cls, a_values: Sequence[int], w_sets: Mapping[PrimePower, Sequence[int]],
                 z: float, d_cutoff: float, x_mass: Optional[float] = None,
                 density: Optional[Mapping[PrimePower, float]] = None, **kw) -> "SieveInstance":
        """Instance on an explicit multiset; by default w(p^nu) = |W(p^nu)| and X = |A|."""
        rs = ResidueSystem(z, {k: frozenset(v) for k, v in w_sets.items()})
        if density is None:
            density = {k: float(len(v)) for k, v in rs.entries.items()}
        a = tuple(int(t) for t in a_values)
        return cls(residues=rs, density=DensityFunction(density), d_cutoff=d_cutoff,
                   x_mass=float(len(a) if x_mass is None else x_mass), a_values=a, **kw)

    @property
    def z(self) -> float:
        return self.residues.z

    @property
    def size(self) -> int:
        if self.a_values is not None:
            return len(self.a_values)
        return self.interval[1] - self.interval[0] + 1

    def values_mod(self, modulus: int) -> np.ndarray:
        """a mod modulus for every a in A, in a fixed order."""
        if modulus not in self._cache:
            if self.a_values is not None:
                out = np.array([a % modulus for a in self.a_values], dtype=np.int64)
            else:
                if modulus >= 3 * 10 ** 9:
                    raise InvalidInputError("modulus too large for vectorized evaluation")
                lo, hi = self.interval
                n = (np.arange(lo, hi + 1, dtype=np.int64) % modulus)
                out = np.zeros_like(n)
                for c in reversed(self.poly_coeffs):
                    out = (out * n + (c % modulus)) % modulus
            self._cache[modulus] = out
        return self._cache[modulus]

    def mask(self, p: int, nu: int) -> np.ndarray:
        """Boolean array: a in W(p^nu)."""
        key = ("mask", p, nu)
        if key not in self._cache:
            w = self.residues.get(p, nu)
            if not w:
                m = np.zeros(self.size, dtype=bool)
            else:
                m = np.isin(self.values_mod(p ** nu), np.fromiter(w, dtype=np.int64))
            self._cache[key] = m
        return self._cache[key]

    def count_in(self, d: int) -> int:
        """#{a in A : a in W(d)}."""
        m = np.ones(self.size, dtype=bool)
        for p, nu in factorize(d).items():
            m &= self.mask(p, nu)
        return int(np.count_nonzero(m))

    def remainder(self, d: int) -> float:
        if self.remainders is not None:
            if d not in self.remainders:
                raise InvalidInputError(f"no remainder supplied for d = {d}")
            return float(self.remainders[d])
        return self.count_in(d) - self.density.of(d) * self.x_mass / d

    # -- optimal weights ----------------------------------------------------

    def _support_components(self) -> Dict[int, List[int]]:
        dens = self.density
        return {p: [nu for nu in range(1, dens.top(p) + 1) if dens.value(p, nu) > 0] for p in dens.primes}

    def weights(self) -> Dict[int, float]:
        """All nonzero lambda*_d, keyed by d (d <= D)."""
        if "weights" in self._cache:
            return self._cache["weights"]
        dens = self.density
        comps = self._support_components()
        local: Dict[PrimePower, Tuple[float, float, float]] = {}
        for p, nus in comps.items():
            for mu in nus:
                t0, t1 = dens.theta(p, mu - 1), dens.theta(p, mu)
                fm = 1.0 / t1 - 1.0 / t0  # t*(p^mu,1)^2 / g(p^mu)
                # (nu = 0, 0 < nu < mu, nu = mu) factors of t*(m,d) t*(m,1) / g(m)
                local[(p, mu)] = (fm, -fm, -1.0 / t1)
        terms: Dict[int, List[float]] = {}
        for _, parts in _lattice(comps, self.d_cutoff):
            # expand d over the choices 0 <= nu <= mu on each component
            partial = [(1, 1.0)]
            for p, mu in parts:
                a0, amid, atop = local[(p, mu)]
                nxt = []
                for d, c in partial:
                    nxt.append((d, c * a0))
                    for nu in range(1, mu):
                        nxt.append((d * p ** nu, c * amid))
                    nxt.append((d * p ** mu, c * atop))
                partial = nxt
            for d, c in partial:
                terms.setdefault(d, []).append(c)
        den = math.fsum(terms[1])
        out = {d: math.fsum(v) / den for d, v in terms.items()}
        out = {d: v for d, v in out.items() if v != 0.0}
        out[1] = 1.0
        self._cache["weights"] = out
        self._cache["denominator"] = den
        return out

    def lambda_star(self, d: int) -> float:
        if d < 1:
            raise InvalidInputError("d must be >= 1")
        if d > self.d_cutoff:
            return 0.0
        return self.weights().get(d, 0.0)

    def weight_denominator(self) -> float:
        """sum over m <= D of t*(m,1)^2 / g(m)."""
        self.weights()
        return self._cache["denominator"]

    def quadratic_form(self) -> float:
        """sum_{d,d' <= D} lambda*_d lambda*_d' eps(d,d') w([d,d'])/[d,d'], by direct double sum."""
        lam = sorted(self.weights().items())
        facs = {d: factorize(d) for d, _ in lam}
        terms = []
        for d, ld in lam:
            fa = facs[d]
            for e, le in lam:
                fb = facs[e]
                val = ld * le
                for p in set(fa) | set(fb):
                    mu, nu = fa.get(p, 0), fb.get(p, 0)
                    if mu and nu and mu != nu:
                        val = 0.0
                        break
                    k = max(mu, nu)
                    val *= self.density.value(p, k) / p ** k
                    if val == 0.0:
                        break
                if val:
                    terms.append(val)
        return math.fsum(terms)

    # -- bound ----------------------------------------------------------------

    def sieve_f(self) -> MultiplicativeSpec:
        return self.density.sieve_f()

    def psi_denominator(self) -> float:
        """psi_f(D, z) with the sieve function f."""
        return psi_f(self.d_cutoff, self.z, self.sieve_f())

    def main_term(self) -> float:
        return self.x_mass / self.psi_denominator()

    def remainder_bound(self) -> float:
        """sum over z-friable m <= D^2 of 3^omega(m) |r_m|.

        Only m whose every component carries a nonempty W-set or a positive
        density can have r_m != 0; the others are skipped.
        """
        comps: Dict[int, List[int]] = {}
        for p, nu in set(self.residues.entries) | set(self.density.w):
            if self.residues.get(p, nu) or self.density.value(p, nu) > 0:
                comps.setdefault(p, []).append(nu)
        for v in comps.values():
            v.sort()
        bound = self.d_cutoff ** 2
        primes = sorted(comps)
        terms: List[float] = []
        supplied = self.remainders is not None

        def walk(i: int, m: int, omega: int, mask: Optional[np.ndarray], wm: float):
            if i == len(primes):
                if supplied:
                    r = self.remainder(m)
                else:
                    cnt = self.size if mask is None else int(np.count_nonzero(mask))
                    r = cnt - wm * self.x_mass / m
                if r:
                    terms.append(3.0 ** omega * abs(r))
                return
            walk(i + 1, m, omega, mask, wm)
            p = primes[i]
            for nu in comps[p]:
                mm = m * p ** nu
                if mm > bound:
                    break
                wv = wm * self.density.value(p, nu)
                if supplied:
                    walk(i + 1, mm, omega + 1, None, wv)
                    continue
                nm = self.mask(p, nu) if mask is None else mask & self.mask(p, nu)
                if wv == 0.0 and not nm.any():
                    continue  # r vanishes on the whole subtree
                walk(i + 1, mm, omega + 1, nm, wv)

        walk(0, 1, 0, None, 1.0)
        return math.fsum(terms)

    def brute_count(self) -> int:
        """S(A, P; z): elements of A outside every W(p^nu)."""
        hit = np.zeros(self.size, dtype=bool)
        for p, nu in self.residues.entries:
            hit |= self.mask(p, nu)
        return int(self.size - np.count_nonzero(hit))

    def selberg_square(self) -> np.ndarray:
        """For each a in A, (sum_{d : a in W(d)} lambda*_d)^2."""
        acc = np.zeros(self.size)
        for d, lam in self.weights().items():
            m = np.ones(self.size, dtype=bool)
            for p, nu in factorize(d).items():
                m &= self.mask(p, nu)
            acc[m] += lam
        return acc * acc

    def report(self, brute: bool = True) -> SieveReport:
        main = self.main_term()
        rem = self.remainder_bound()
        lam = self.weights()
        return SieveReport(
            main_term=main, remainder=rem, bound=main + rem,
            brute_count=self.brute_count() if brute else None,
            weights_max_abs=max(abs(v) for v in lam.values()),
            x_mass=self.x_mass, d_cutoff=self.d_cutoff, z=self.z,
        )


def lambda_star(instance: SieveInstance, d: int) -> float:
    return instance.lambda_star(d)


def main_term(instance: SieveInstance) -> float:
    return instance.main_term()


def remainder_bound(instance: SieveInstance) -> float:
    return instance.remainder_bound()


def brute_count(instance: SieveInstance) -> int:
    return instance.brute_count()


def sieve_bound(instance: SieveInstance, brute: bool = True) -> SieveReport:
    return instance.report(brute)


def random_instance(rng: np.random.Generator, max_size: int = 10 ** 4, max_z: int = 13,
                    max_d: float = 200.0) -> SieveInstance:
    """A random interval instance with disjoint W-sets and natural densities."""
    lo = int(rng.integers(-1000, 1000))
    size = int(rng.integers(1, max_size + 1))
    z = int(rng.integers(2, max_z + 1))
    w_sets: Dict[PrimePower, List[int]] = {}
    for p in (int(q) for q in primes_up_to(z).primes):
        if rng.random() < 0.3:
            continue
        used: set = set()  # residues mod p^top already covered, to keep the classes disjoint
        top = int(rng.integers(1, 4))
        q_top = p ** top
        for nu in range(1, top + 1):
            q = p ** nu
            free = [r for r in range(q) if all((r + q * t) % q_top not in used for t in range(q_top // q))]
            if not free:
                break
            k = int(rng.integers(0, max(1, min(len(free), q // 2)) + 1))
            chosen = sorted(int(r) for r in rng.choice(free, size=min(k, len(free)), replace=False))
            if sum(Fraction(len(w_sets.get((p, m), [])), p ** m) for m in range(1, nu)) + Fraction(len(chosen), q) >= 1:
                chosen = chosen[:-1]
            if chosen:
                w_sets[(p, nu)] = chosen
                for r in chosen:
                    for t in range(q_top // q):
                        used.add((r + q * t) % q_top)
    d_cut = float(rng.uniform(2.0, max_d))
    return SieveInstance.explicit(range(lo, lo + size), w_sets, z=z, d_cutoff=d_cut)
