"""Congruence solving, certified continued-fraction convergents, and X_j selection."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError, PrecisionWarning
from .fixedreal import FixedReal
from .params import Params, exact

LOG2_VALUE_CAP = 1000


def crt_pair(r1, d1, r2, d2):
    """Solve m = r1 (mod d1), m = r2 (mod d2).

    Returns ``(f0, lcm)`` with 0 <= f0 < lcm, or None when the system is inconsistent.
    """
    if d1 < 1 or d2 < 1:
        raise DomainError("moduli must be positive")
    g = math.gcd(d1, d2)
    if (r2 - r1) % g:
        return None
    lcm = d1 // g * d2
    step = d2 // g
    t = ((r2 - r1) // g * pow(d1 // g, -1, step)) % step if step > 1 else 0
    return (r1 + d1 * t) % lcm, lcm


def solve_linear(a, b, n):
    """Solve a*x = b (mod n); returns ``(x0, n/g)`` or None."""
    g = math.gcd(a, n)
    if b % g:
        return None
    n2 = n // g
    if n2 == 1:
        return 0, 1
    return (b // g * pow(a // g, -1, n2)) % n2, n2


def shifted_congruences(l1, d1, l2, d2):
    """Residue class of m with m*l1 + 2 = 0 (mod d1) and m*l2 + 2 = 0 (mod d2)."""
    s1 = solve_linear(l1, -2, d1)
    s2 = solve_linear(l2, -2, d2)
    if s1 is None or s2 is None:
        return None
    return crt_pair(s1[0], s1[1], s2[0], s2[1])


@dataclass(frozen=True)
class Convergent:
    A: int
    Q: int

    def __post_init__(self):
        if self.Q < 1 or math.gcd(self.A, self.Q) != 1:
            raise DomainError(f"invalid convergent {self.A}/{self.Q}")

    def error_bound(self, alpha: FixedReal) -> Fraction:
        """Certified sup of |alpha - A/Q| over alpha's error interval."""
        center = alpha.to_fraction() - Fraction(self.A, self.Q)
        return abs(center) + alpha.error

    def satisfies_dirichlet(self, alpha: FixedReal) -> bool:
        return self.error_bound(alpha) < Fraction(1, self.Q ** 2)


def _certified_partial_quotients(alpha: FixedReal, count):
    lo = alpha.to_fraction() - alpha.error
    hi = alpha.to_fraction() + alpha.error
    while count > 0:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            return
        yield a_lo
        count -= 1
        lo, hi = lo - a_lo, hi - a_lo
        if lo == 0 or hi == 0:
            return
        lo, hi = 1 / hi, 1 / lo


def convergents(alpha: FixedReal, count: int) -> list[Convergent]:
    """First ``count`` convergents with strictly increasing denominators.

    Only partial quotients shared by every real in alpha's error interval are
    used, so each convergent is a genuine convergent of alpha. If precision runs
    out first, the partial list is returned and a ``PrecisionWarning`` is issued.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    out: list[Convergent] = []
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    # one extra quotient so that a repeated Q = 1 at the start can be dropped
    for a in _certified_partial_quotients(alpha, count + 1):
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        conv = Convergent(h, k)
        if out and out[-1].Q == conv.Q:
            out[-1] = conv
        else:
            out.append(conv)
    if len(out) < count:
        warnings.warn(f"precision exhausted after {len(out)} of {count} convergents",
                      PrecisionWarning, stacklevel=2)
    return out[:count]


@dataclass(frozen=True)
class XjReport:
    Q: int
    exponent: Fraction
    log2_X: float
    value: int | None
    exceeds_cap: bool
    paper_mode: bool

    @property
    def computable(self) -> bool:
        return not self.paper_mode and not self.exceeds_cap


def xj_from_convergent(q: Convergent, params: Params, cap: int = 10 ** 7) -> XjReport:
    """Invert Q = X^((4138/15) theta) to X_j = Q^(15/(4138 theta))."""
    theta = exact(params.theta)
    if theta <= 0:
        raise DomainError("theta must be positive")
    e = Fraction(15) / (4138 * theta)
    log2x = float(e) * math.log2(q.Q)
    value = round(q.Q ** float(e)) if log2x <= LOG2_VALUE_CAP else None
    exceeds = value is None or value > cap
    return XjReport(q.Q, e, log2x, value, exceeds, params.mode == "paper")
