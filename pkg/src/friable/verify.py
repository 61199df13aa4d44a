"""Randomized verification suites with fixed tolerances.

Every suite yields rows (instance id, parameters, lhs, rhs, relative residual)
from a numpy generator seeded by the caller, so reruns are reproducible.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional

import numpy as np

from .arith.identities import verify_partial_sum_equation, verify_tail_equation
from .arith.multiplicative import MultiplicativeSpec
from .arith.primes import primes_up_to
from .sieve.selberg import random_instance
from .specfn import EULER_GAMMA, adjoint_identity, default_table

TOLERANCES = {
    "tail": 1e-10,
    "partial": 1e-10,
    "adjoint": 1e-7,
    "quadform": 1e-9,
    "normalization": 1e-6,
}
SUITES = tuple(TOLERANCES)


@dataclass(frozen=True)
class Row:
    suite: str
    instance: str
    params: str
    lhs: float
    rhs: float
    residual: float


def random_squarefree_spec(rng: np.random.Generator, y: int) -> MultiplicativeSpec:
    """Either a uniform c on primes or a table with a few random prime values."""
    if rng.random() < 0.5:
        return MultiplicativeSpec.squarefree_uniform(round(float(rng.uniform(0.25, 3.0)), 6))
    ps = [int(p) for p in primes_up_to(max(2, y)).primes]
    chosen = rng.choice(ps, size=min(len(ps), int(rng.integers(1, 5))), replace=False)
    entries = {(int(p), 1): round(float(rng.uniform(0.0, 3.0)), 6) for p in chosen}
    return MultiplicativeSpec.table(entries, default_prime=round(float(rng.uniform(0.25, 3.0)), 6))


def _identity_corpus(rng: np.random.Generator, size: int):
    for i in range(size):
        y = int(rng.integers(2, 51))
        x = int(rng.integers(2, 10 ** 4 + 1))
        kappa = round(float(rng.uniform(0.5, 3.0)), 6)
        yield f"sf{i:03d}", x, y, kappa, random_squarefree_spec(rng, y)
    tau2 = MultiplicativeSpec.tau_kappa(2.0)
    for x in range(2, 31):
        y = int(rng.integers(2, x + 1))
        yield f"tau2_x{x:02d}", x, y, 2.0, tau2


def tail_suite(rng: np.random.Generator, size: int = 50) -> Iterator[Row]:
    for iid, x, y, kappa, spec in _identity_corpus(rng, size):
        mode = "exact" if spec.is_squarefree else "series"
        r = verify_tail_equation(x, y, kappa, spec, mode=mode)
        yield Row("tail", iid, f"x={x};y={y};kappa={kappa};mode={mode};spec={spec.to_json()}",
                  r.lhs, r.rhs, r.relative)


def partial_suite(rng: np.random.Generator, size: int = 50) -> Iterator[Row]:
    for iid, x, _, kappa, spec in _identity_corpus(rng, size):
        r = verify_partial_sum_equation(x, kappa, spec)
        yield Row("partial", iid, f"x={x};kappa={kappa};spec={spec.to_json()}", r.lhs, r.rhs, r.relative)


def adjoint_suite(rng: np.random.Generator, size: int = 0) -> Iterator[Row]:
    for kappa in (1.0, 2.0):
        table = default_table(kappa)
        for u in (1.5, 2.0, 3.0, 5.0):
            r = adjoint_identity(u, table)
            yield Row("adjoint", f"k{kappa:g}_u{u:g}", f"u={u};kappa={kappa}", r.lhs, r.rhs, r.relative)


def quadform_suite(rng: np.random.Generator, size: int = 100) -> Iterator[Row]:
    for i in range(size):
        inst = random_instance(rng, max_size=2000, max_d=200.0)
        qf = inst.quadratic_form()
        target = 1.0 / inst.psi_denominator()
        yield Row("quadform", f"sv{i:03d}", f"D={inst.d_cutoff:.12e};z={inst.z:g};|A|={inst.size}",
                  qf, target, abs(qf - target) / target)


def normalization_suite(rng: np.random.Generator, size: int = 0) -> Iterator[Row]:
    for kappa in (0.5, 1.0, 2.0, 3.0):
        total = default_table(kappa).gamma_kappa_norm
        target = math.exp(EULER_GAMMA * kappa)
        yield Row("normalization", f"k{kappa:g}", f"kappa={kappa}", total, target, abs(total - target) / target)


RUNNERS: Dict[str, Callable[..., Iterator[Row]]] = {
    "tail": tail_suite,
    "partial": partial_suite,
    "adjoint": adjoint_suite,
    "quadform": quadform_suite,
    "normalization": normalization_suite,
}


def run_suite(name: str, seed: int = 0, tol: Optional[float] = None) -> List[tuple]:
    """Rows (Row, tolerance, passed) for one suite; the generator is seeded per suite."""
    rng = np.random.default_rng([seed, SUITES.index(name)])
    limit = TOLERANCES[name] if tol is None else tol
    return [(row, limit, row.residual <= limit) for row in RUNNERS[name](rng)]
