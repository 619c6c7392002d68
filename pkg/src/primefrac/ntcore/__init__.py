"""Arithmetic substrate: parameters, fixed-point reals, factor tables, congruences."""

from .diophantine import (Convergent, XjReport, convergents, crt_pair, shifted_congruences,
                          solve_linear, xj_from_convergent)
from .factor import (FactorTable, build_factor_table, coprime_mask, coprime_to_Pz, factorize,
                     format_factorization, mertens_pi, mertens_pi_exact, odd_primes_upto,
                     omega_of_shifted, primes_upto)
from .fixedreal import FixedReal, FracNorm, frac_norm, frac_phases
from .params import DEMO_SIEVE, PAPER_DELTA, PAPER_ETA, PAPER_KAPPA, PAPER_RHO, PAPER_S, THETA_MAX, Params

__all__ = [
    "Convergent", "XjReport", "convergents", "crt_pair", "shifted_congruences", "solve_linear",
    "xj_from_convergent", "FactorTable", "build_factor_table", "coprime_mask", "coprime_to_Pz",
    "factorize", "format_factorization", "mertens_pi", "mertens_pi_exact", "odd_primes_upto",
    "omega_of_shifted", "primes_upto", "FixedReal", "FracNorm", "frac_norm", "frac_phases", "DEMO_SIEVE", "PAPER_DELTA",
    "PAPER_ETA", "PAPER_KAPPA", "PAPER_RHO", "PAPER_S", "THETA_MAX", "Params",
]
