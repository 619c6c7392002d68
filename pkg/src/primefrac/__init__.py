"""Desk-scale verification of quadratic fractional parts of primes with almost-prime shifts."""

__version__ = "0.1.0"
