"""Double-double evaluation of cosine series with a certified roundoff budget.

Used wherever a float64 comparison would drown the quantity being checked,
e.g. Fourier tails of size 1e-25. Values are carried as (hi, lo) pairs of
float64 with |lo| <= ulp(hi)/2, about 106 significant bits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from . import kernels
from .errors import DomainError

TABLE_BITS = 14
TABLE_SIZE = 1 << TABLE_BITS
# Per-term relative error of the dd kernel: phase split, table entry, Taylor
# remainder (x^8/8! <= 1.2e-32 at |x| <= 2pi/2^14) and five dd products.
TERM_REL_ERR = 2.0 ** -99
# Relative error of one dd addition in the pairwise reduction.
ADD_REL_ERR = 2.0 ** -103


def fraction_to_dd(q) -> tuple[float, float]:
    q = Fraction(q)
    hi = float(q)
    return hi, float(q - Fraction(hi))


def mpf_to_dd(x) -> tuple[float, float]:
    hi = float(x)
    return hi, float(x - hi)


def dd_to_fraction(hi, lo) -> Fraction:
    return Fraction(hi) + Fraction(lo)


def mantissa_to_dd(m: int, bits: int) -> tuple[float, float]:
    """Fixed-point mantissa m * 2^-bits in [0, 1) as a dd pair (error <= 2^-106)."""
    return fraction_to_dd(Fraction(m >> max(bits - 120, 0), 1 << min(bits, 120)))


@lru_cache(maxsize=1)
def _table():
    with mpmath.workprec(140):
        two_pi = 2 * mpmath.pi
        c = [mpf_to_dd(mpmath.cos(two_pi * m / TABLE_SIZE)) for m in range(TABLE_SIZE)]
        s = [mpf_to_dd(mpmath.sin(two_pi * m / TABLE_SIZE)) for m in range(TABLE_SIZE)]
        consts = [*mpf_to_dd(two_pi), *mpf_to_dd(mpmath.mpf(1) / 6)]
    arr = lambda v: np.ascontiguousarray(v, dtype=np.float64)  # noqa: E731
    c_hi, c_lo = (arr(x) for x in zip(*c))
    s_hi, s_lo = (arr(x) for x in zip(*s))
    return c_hi, c_lo, s_hi, s_lo, arr(consts)


def dd_cos_partial_sums(g_hi, g_lo, t_hi, t_lo, marks, impl=None):
    """sum_{1<=k<=K} g_k cos(2 pi k t) for each K in ``marks``, in double-double.

    Returns (hi, lo) with shape (len(marks), len(t)).
    """
    marks = np.ascontiguousarray(marks, dtype=np.int64)
    if marks.size == 0 or np.any(np.diff(marks) < 0) or marks[0] < 0 or marks[-1] > len(g_hi):
        raise DomainError("marks must be non-decreasing and within the coefficient range")
    impl = impl or kernels
    f64 = lambda v: np.ascontiguousarray(v, dtype=np.float64)  # noqa: E731
    return impl.dd_cos_series(f64(g_hi), f64(g_lo), f64(t_hi), f64(t_lo), *_table(), marks)


def dd_budget(abs_g, phase_err=0.0) -> np.ndarray:
    """Certified error bound of ``dd_cos_partial_sums`` at every prefix length.

    ``abs_g`` are |g_k| for k = 1..K; ``phase_err`` bounds |t - t_dd|.
    Entry K-1 bounds the error of the K-term partial sum.
    """
    abs_g = np.asarray(abs_g, dtype=np.float64)
    k = np.arange(1, abs_g.size + 1)
    per_term = np.cumsum(abs_g * (TERM_REL_ERR + 2 * math.pi * k * phase_err))
    levels = np.ceil(np.log2(np.maximum(k, 2))) + 1
    return 1.01 * (per_term + levels * ADD_REL_ERR * np.cumsum(abs_g))
