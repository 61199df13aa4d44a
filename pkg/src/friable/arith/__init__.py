"""Multiplicative functions, friable sums and the identities they satisfy."""

from .bounds import Envelopes, alpha_kappa, envelopes, error_envelope, rankin_bound
from .hypotheses import (HypothesisReport, RfEvaluator, c_kappa, hypothesis_report, mertens_ratio,
                         r_f, z_moments)
from .identities import IdentityCheck, verify_partial_sum_equation, verify_tail_equation
from .multiplicative import ONE, MultiplicativeSpec, f_value, restricted
from .primes import PrimeTable, factorize, largest_prime_factor, prime_power_split, primes_up_to
from .sums import (FriableSumReport, big_psi_f, enumerate_friable, f1y, friable_arrays,
                   friable_report, psi_f, psi_f_star)

__all__ = [
    "ONE", "Envelopes", "FriableSumReport", "HypothesisReport", "IdentityCheck",
    "MultiplicativeSpec", "PrimeTable", "RfEvaluator", "alpha_kappa", "big_psi_f", "c_kappa",
    "enumerate_friable", "envelopes", "error_envelope", "f1y", "f_value", "factorize",
    "friable_arrays", "friable_report", "hypothesis_report", "largest_prime_factor",
    "mertens_ratio", "prime_power_split", "primes_up_to", "psi_f", "psi_f_star", "r_f",
    "rankin_bound", "restricted", "verify_partial_sum_equation", "verify_tail_equation",
    "z_moments",
]
