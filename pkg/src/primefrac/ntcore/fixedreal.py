"""Binary fixed-point reals with a certified error and exact mod-1 reduction.

A ``FixedReal`` stands for a real number a with |a - mantissa * 2^-bits| <= err,
where err is 0 when the source is a dyadic rational and 2^-bits otherwise.
Reduction mod 1 of ``mantissa * N`` is exact integer arithmetic, which is what
makes frac(a p^2 + b) certifiable for large p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from ..errors import DomainError, PrecisionError

DEFAULT_BITS = 256
_GUARD = 64
TAGS = ("sqrt2", "golden", "e", "pi")


def _e_fixed(bits):
    one = 1 << (bits + _GUARD)
    total, term, k = 0, one, 0
    while term:
        total += term
        k += 1
        term //= k
    return total >> _GUARD


def _arctan_inv(x, one):
    # arctan(1/x) * one by the alternating Taylor series
    power = one // x
    total, n, x2, sign = power, 1, x * x, 1
    while power:
        power //= x2
        n += 2
        sign = -sign
        total += sign * (power // n)
    return total


def _pi_fixed(bits):
    one = 1 << (bits + _GUARD)
    pi = 4 * (4 * _arctan_inv(5, one) - _arctan_inv(239, one))
    return pi >> _GUARD


def _tag_mantissa(tag, bits):
    if tag.startswith("-"):
        return -_tag_mantissa(tag[1:], bits)
    if tag == "sqrt2":
        return isqrt(2 << (2 * bits))
    if tag == "golden":
        return ((1 << bits) + isqrt(5 << (2 * bits))) // 2
    if tag == "e":
        return _e_fixed(bits)
    if tag == "pi":
        return _pi_fixed(bits)
    raise DomainError(f"unknown symbolic tag {tag!r}; known: {TAGS}")


@dataclass(frozen=True)
class FixedReal:
    mantissa: int
    bits: int = DEFAULT_BITS
    tag: str | None = None
    source: Fraction | None = None

    @classmethod
    def from_tag(cls, tag, bits=DEFAULT_BITS):
        return cls(_tag_mantissa(tag, bits), bits, tag=tag)

    @classmethod
    def from_fraction(cls, q, bits=DEFAULT_BITS):
        q = Fraction(q)
        return cls((q.numerator << bits) // q.denominator, bits, source=q)

    @classmethod
    def zero(cls, bits=DEFAULT_BITS):
        return cls(0, bits, source=Fraction(0))

    @classmethod
    def parse(cls, spec, bits=DEFAULT_BITS):
        """Accept a symbolic tag, a decimal string, or a ratio ``"a/b"``."""
        if isinstance(spec, FixedReal):
            return spec.at_precision(bits)
        if isinstance(spec, Fraction):
            return cls.from_fraction(spec, bits)
        if isinstance(spec, (int, float)):
            return cls.from_fraction(Fraction(repr(spec)) if isinstance(spec, float) else spec, bits)
        text = str(spec).strip()
        if text.lstrip("-") in TAGS:
            return cls.from_tag(text, bits)
        if re.fullmatch(r"[-+]?\d+\s*/\s*\d+|[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?", text):
            return cls.from_fraction(Fraction(text.replace(" ", "")), bits)
        raise DomainError(f"cannot parse real {spec!r}")

    @property
    def is_rational(self) -> bool:
        return self.source is not None

    @property
    def is_exact(self) -> bool:
        """True when the mantissa represents the value with no error."""
        return self.source is not None and self.source * (1 << self.bits) == self.mantissa

    @property
    def error(self) -> Fraction:
        return Fraction(0) if self.is_exact else Fraction(1, 1 << self.bits)

    @property
    def spec(self) -> str:
        if self.tag:
            return self.tag
        if self.source is not None:
            return str(self.source)
        return f"{self.mantissa}*2^-{self.bits}"

    def at_precision(self, bits):
        """Re-derive at another precision from the symbolic or rational source."""
        if self.tag:
            return FixedReal.from_tag(self.tag, bits)
        if self.source is not None:
            return FixedReal.from_fraction(self.source, bits)
        if bits <= self.bits:
            return FixedReal(self.mantissa >> (self.bits - bits), bits)
        raise PrecisionError("value has no symbolic source; cannot raise precision")

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.bits)

    def __float__(self):
        return self.mantissa / (1 << self.bits)

    def __neg__(self):
        tag = None
        if self.tag:
            tag = self.tag[1:] if self.tag.startswith("-") else "-" + self.tag
        src = -self.source if self.source is not None else None
        return FixedReal(-self.mantissa, self.bits, tag=tag, source=src)

    def shifted(self, k: int):
        """a + k for integer k (exact on the representation)."""
        src = self.source + k if self.source is not None else None
        return FixedReal(self.mantissa + (k << self.bits), self.bits, source=src)

    def frac_mantissas(self, n):
        """Exact mantissas of frac(a * n) for integer(s) n, as Python ints."""
        mod = (1 << self.bits) - 1
        if np.ndim(n) == 0:
            return (self.mantissa * int(n)) & mod
        return [(self.mantissa * int(v)) & mod for v in np.asarray(n).ravel()]

    def phases(self, n, offset=None):
        """frac(a * n + offset) as float64, computed exactly before rounding."""
        ms = self.frac_mantissas(np.atleast_1d(n))
        if offset is not None:
            off = _align(offset.mantissa, offset.bits, self.bits)
            mod = (1 << self.bits) - 1
            ms = [(m + off) & mod for m in ms]
        return mantissas_to_float(ms, self.bits)


def frac_phases(alpha: FixedReal, n) -> np.ndarray:
    """frac(alpha * n) as float64 for an integer array n, exact before rounding.

    Representations with at most 64 fractional bits use uint64 wraparound,
    which is multiplication mod 2^64; wider ones go through Python integers.
    """
    n = np.asarray(n)
    if alpha.bits <= 64:
        a = np.uint64((alpha.mantissa % (1 << alpha.bits)) << (64 - alpha.bits))
        with np.errstate(over="ignore"):
            m = a * n.astype(np.int64).view(np.uint64)
        return (m >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    return alpha.phases(n.ravel()).reshape(n.shape)


def _align(mantissa, from_bits, to_bits):
    if from_bits <= to_bits:
        return mantissa << (to_bits - from_bits)
    return mantissa >> (from_bits - to_bits)


def mantissas_to_float(ms, bits):
    """Fixed-point mantissas in [0, 2^bits) to float64 in [0, 1)."""
    drop = max(bits - 60, 0)
    return np.array([m >> drop for m in ms], dtype=np.float64) / float(1 << (bits - drop))


def _norm_of(m, bits):
    return min(m, (1 << bits) - m)


@dataclass(frozen=True)
class FracNorm:
    frac: float
    norm: float
    frac_mantissa: int
    bits: int
    error: Fraction

    @property
    def norm_fraction(self) -> Fraction:
        return Fraction(_norm_of(self.frac_mantissa, self.bits), 1 << self.bits)

    def below(self, threshold) -> bool:
        """Certified test norm < threshold; raises PrecisionError when undecidable."""
        thr = Fraction(threshold)
        nf = self.norm_fraction
        if nf + self.error < thr:
            return True
        if nf - self.error >= thr:
            return False
        raise PrecisionError(f"norm {float(nf):.3e} within certified error of threshold {float(thr):.3e}")


def frac_norm(alpha: FixedReal, beta: FixedReal, p: int) -> FracNorm:
    """frac(alpha p^2 + beta) and its distance to the nearest integer."""
    p = int(p)
    p2 = p * p
    need = 2 * p2.bit_length() + 64
    if alpha.bits < need:
        raise PrecisionError(f"alpha carries {alpha.bits} bits; p={p} needs >= {need}")
    bits = max(alpha.bits, beta.bits)
    ma = _align(alpha.mantissa, alpha.bits, bits)
    mb = _align(beta.mantissa, beta.bits, bits)
    m = (ma * p2 + mb) & ((1 << bits) - 1)
    err = alpha.error * p2 + beta.error
    frac = m / (1 << bits)
    return FracNorm(frac=frac, norm=min(frac, 1.0 - frac), frac_mantissa=m, bits=bits, error=err)
