"""Selberg upper-bound sieve by prime-power residue classes."""

from .poly import (bad_primes, discriminant_valuation_bound, irreducible_factor_count,
                   is_squarefree_poly, poly_eval, rho_composite, rho_poly)
from .polynomial import (PolynomialSieveResult, SieveEnvelope, local_density, polynomial_sieve,
                         sieve_envelope)
from .selberg import (DensityFunction, ResidueSystem, SieveInstance, SieveReport, brute_count,
                      epsilon, g_val, lambda_star, main_term, random_instance, remainder_bound,
                      sieve_bound, t_star, theta)

__all__ = [
    "DensityFunction", "PolynomialSieveResult", "ResidueSystem", "SieveEnvelope", "SieveInstance",
    "SieveReport", "bad_primes", "brute_count", "discriminant_valuation_bound", "epsilon", "g_val",
    "irreducible_factor_count", "is_squarefree_poly", "lambda_star", "local_density", "main_term",
    "poly_eval", "polynomial_sieve", "random_instance", "remainder_bound", "rho_composite",
    "rho_poly", "sieve_bound", "sieve_envelope", "t_star", "theta",
]
