"""Segmented smallest-prime-factor tables and the multiplicative functions on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .. import kernels
from ..errors import DomainError, ResourceError

SEGMENT_CAP = 1 << 26


@lru_cache(maxsize=16)
def _primes_upto_cached(n):
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p::2 * p] = False
    out = np.flatnonzero(sieve).astype(np.int64)
    out.setflags(write=False)
    return out


def primes_upto(n) -> np.ndarray:
    """All primes p <= n (read-only int64 array)."""
    return _primes_upto_cached(int(math.floor(n)))


def odd_primes_upto(z) -> np.ndarray:
    """Primes 2 < p <= z: the prime divisors of P(z)."""
    ps = primes_upto(z)
    return ps[ps > 2]


@dataclass(frozen=True, eq=False)
class FactorTable:
    """spf, Omega, omega, mu, phi for every n in [lo, hi)."""

    lo: int
    hi: int
    spf: np.ndarray
    big_omega: np.ndarray
    omega: np.ndarray
    mu: np.ndarray
    phi: np.ndarray

    def __len__(self):
        return self.hi - self.lo

    def __contains__(self, n):
        return self.lo <= n < self.hi

    def _i(self, n):
        n = int(n)
        if not self.lo <= n < self.hi:
            raise DomainError(f"{n} outside table range [{self.lo}, {self.hi})")
        return n - self.lo

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    @property
    def is_prime(self) -> np.ndarray:
        return self.big_omega == 1

    @property
    def mangoldt(self) -> np.ndarray:
        """Lambda(n): log spf(n) on prime powers, else 0."""
        out = np.zeros(len(self))
        pp = self.omega == 1
        out[pp] = np.log(self.spf[pp].astype(np.float64))
        return out

    def primes(self) -> np.ndarray:
        return self.numbers[self.is_prime]

    def spf_of(self, n) -> int:
        return int(self.spf[self._i(n)])

    def mu_of(self, n) -> int:
        return int(self.mu[self._i(n)])

    def phi_of(self, n) -> int:
        return int(self.phi[self._i(n)])

    def big_omega_of(self, n) -> int:
        return int(self.big_omega[self._i(n)])

    def mangoldt_of(self, n) -> float:
        i = self._i(n)
        return math.log(int(self.spf[i])) if self.omega[i] == 1 else 0.0


def build_factor_table(lo, hi, cap=SEGMENT_CAP) -> FactorTable:
    lo, hi = int(lo), int(hi)
    if lo < 1:
        raise DomainError(f"table range must start at >= 1, got lo={lo}")
    if hi <= lo:
        raise DomainError(f"empty range [{lo}, {hi})")
    if hi - lo > cap:
        raise ResourceError(f"range of {hi - lo} entries exceeds segment cap {cap}")
    base = primes_upto(math.isqrt(hi - 1))
    spf, big_omega, omega, mu, phi = kernels.factor_segment(lo, hi, np.ascontiguousarray(base))
    return FactorTable(lo, hi, spf, big_omega, omega, mu, phi)


def factorize(n) -> dict[int, int]:
    """Prime factorisation by trial division (fine for n up to ~10^12)."""
    n = int(n)
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out = {}
    for p in primes_upto(math.isqrt(n)):
        p = int(p)
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def format_factorization(fac: dict[int, int]) -> str:
    return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(fac.items())) or "1"


def omega_of_shifted(p, table: FactorTable) -> int:
    """Omega(p + 2), counted with multiplicity."""
    return table.big_omega_of(int(p) + 2)


def coprime_to_Pz(n, z) -> bool:
    """gcd(n, P(z)) == 1, where P(z) is the product of the odd primes <= z."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    for p in odd_primes_upto(min(z, n)):
        if n % int(p) == 0:
            return False
    return True


def coprime_mask(values, z) -> np.ndarray:
    """Vectorised ``coprime_to_Pz`` over an integer array."""
    values = np.asarray(values, dtype=np.int64)
    mask = np.ones(values.shape, dtype=bool)
    for p in odd_primes_upto(z):
        mask &= values % p != 0
    return mask


def mertens_pi(z) -> float:
    """Pi(z) = prod over 2 < p <= z of (1 - 1/(p - 1))."""
    ps = odd_primes_upto(z).astype(np.float64)
    return math.exp(math.fsum(np.log1p(-1.0 / (ps - 1.0))))


def mertens_pi_exact(z) -> Fraction:
    if z > 10 ** 4:
        raise ResourceError("exact Pi(z) is limited to z <= 10^4")
    num = den = 1
    for p in odd_primes_upto(z):
        num *= int(p) - 2
        den *= int(p) - 1
    return Fraction(num, den)
