"""The periodic cup function chi and its Fourier data.

chi is the indicator of [-Delta/2, Delta/2] convolved with r normalised boxes
of width Delta/r, made 1-periodic. With V an Irwin-Hall(r) variable,

    chi(t) = P(V <= r (1 - |t|/Delta))    for |t| <= Delta,

so chi is a degree-r spline with support (-Delta, Delta) mod 1, chi(0) = 1, and
Fourier coefficients g(k) = Delta sinc(pi k Delta) sinc(pi k Delta / r)^r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.interpolate import BSpline

from . import hp, kernels
from .errors import DomainError
from .ntcore.params import Params


@dataclass(frozen=True)
class CupFunction:
    Delta: float
    r: int
    X: int
    H: float
    mode: str = "demo"

    def __post_init__(self):
        if not 0 < self.Delta < 0.25:
            raise DomainError(f"Delta = {self.Delta} must lie in (0, 1/4)")
        if self.r < 1:
            raise DomainError("smoothing order r must be >= 1")

    @property
    def H_int(self) -> int:
        return math.floor(self.H)

    def __call__(self, t):
        return cup_eval(self, t)

    def coeff(self, k) -> float:
        return cup_coeff(self, k)

    def tail_bound(self, K) -> float:
        return cup_tail_bound(self, K)


def cup_build(params: Params) -> CupFunction:
    if params.X < 100:
        raise DomainError(f"cup function needs X >= 100, got {params.X}")
    Delta = params.Delta
    if not 0 < Delta < 0.25:
        raise DomainError(f"Delta = X^-theta = {Delta:.6g} >= 1/4: support would wrap")
    r = math.ceil(math.log(params.X))
    return CupFunction(Delta=Delta, r=r, X=params.X, H=params.H, mode=params.mode)


# ---- spline evaluation ------------------------------------------------------

def irwin_hall_cdf_exact(x: Fraction, r: int) -> Fraction:
    """P(V <= x) for V a sum of r independent U(0,1), exactly."""
    if x <= 0:
        return Fraction(0)
    if x >= r:
        return Fraction(1)
    total = Fraction(0)
    for k in range(math.floor(x) + 1):
        total += (-1) ** k * math.comb(r, k) * (x - k) ** r
    return total / math.factorial(r)


@lru_cache(maxsize=64)
def _irwin_hall_spline(r):
    # density = cardinal B-spline on knots 0..r; its antiderivative is the cdf
    return BSpline.basis_element(np.arange(r + 1, dtype=float), extrapolate=False).antiderivative()


def _reduce(t):
    t = np.asarray(t, dtype=np.float64)
    return np.abs(t - np.round(t))


def cup_eval_array(f: CupFunction, t) -> np.ndarray:
    """Float evaluation of chi at an array of points (de Boor recursion)."""
    u = _reduce(t)
    x = f.r * (1.0 - u / f.Delta)
    out = np.zeros(np.shape(u))
    inside = x > 0
    if np.any(inside):
        xs = np.minimum(x[inside], f.r)
        vals = _irwin_hall_spline(f.r)(xs)
        out[inside] = np.clip(np.nan_to_num(vals, nan=1.0), 0.0, 1.0)
    return out


def cup_eval(f: CupFunction, t) -> float:
    return float(cup_eval_array(f, np.atleast_1d(float(t)))[0])


def cup_eval_exact(f: CupFunction, t) -> Fraction:
    """chi(t) as an exact rational (t and Delta taken as exact binary values)."""
    t = Fraction(t)
    t -= math.floor(t)
    u = min(t, 1 - t)
    Delta = Fraction(f.Delta)
    if u >= Delta:
        return Fraction(0)
    return irwin_hall_cdf_exact(f.r * (1 - u / Delta), f.r)


# ---- Fourier coefficients -----------------------------------------------------

def coeff_formula(Delta, r, k):
    k = np.asarray(k, dtype=np.float64)
    return Delta * np.sinc(k * Delta) * np.sinc(k * Delta / r) ** r


def cup_coeff(f: CupFunction, k) -> float:
    """g(k) = Delta sinc(pi k Delta) sinc(pi k Delta / r)^r; g(0) = Delta."""
    k = int(k)
    if k == 0:
        return f.Delta
    return float(coeff_formula(f.Delta, f.r, k))


def cup_coeffs(f: CupFunction, K: int) -> np.ndarray:
    """g(1..K) as float64 (g(-k) = g(k))."""
    return coeff_formula(f.Delta, f.r, np.arange(1, K + 1))


@lru_cache(maxsize=8)
def _coeffs_dd(Delta, r, K):
    with mpmath.workprec(128):
        d = mpmath.mpf(Delta)
        out = np.empty((K, 2))
        for k in range(1, K + 1):
            x = mpmath.pi * k * d
            y = x / r
            out[k - 1] = hp.mpf_to_dd(d * (mpmath.sin(x) / x) * (mpmath.sin(y) / y) ** r)
    out.setflags(write=False)
    return out


def cup_coeffs_dd(f: CupFunction, K: int) -> np.ndarray:
    """g(1..K) as double-double pairs, shape (K, 2)."""
    return _coeffs_dd(f.Delta, f.r, int(K))


# ---- tail bounds -------------------------------------------------------------

def tail_bound(Delta, r, K) -> float:
    """Majorant of sum_{|k|>K} |g(k)| for any Delta > 0.

    From |g(k)| <= Delta (pi k Delta)^-1 (r / (pi k Delta))^r and
    sum_{k>K} k^-(r+1) <= K^-r / r.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    if Delta <= 0 or r < 1:
        raise DomainError("need Delta > 0 and r >= 1")
    return 2.0 / (math.pi * r) * (r / (math.pi * Delta * K)) ** r


def cup_tail_bound(f: CupFunction, K) -> float:
    return tail_bound(f.Delta, f.r, K)


# ---- partial Fourier sums ---------------------------------------------------

def fourier_partial(f: CupFunction, t, K) -> np.ndarray:
    """Float Delta + sum_{0<|k|<=K} g(k) e(kt)."""
    phases = np.ascontiguousarray(np.atleast_1d(t), dtype=np.float64)
    return f.Delta + 2.0 * kernels.cos_series(cup_coeffs(f, K), phases)


@dataclass(frozen=True)
class FourierCheck:
    K: int
    tail_bound: float
    max_diff: float
    roundoff: float
    n_points: int

    @property
    def ok(self) -> bool:
        return self.max_diff <= self.tail_bound + self.roundoff


def fourier_vs_spline(f: CupFunction, t, Ks, impl=None) -> list[FourierCheck]:
    """Compare exact spline values with double-double partial Fourier sums.

    ``t`` are float sample points (exact binary values). For each K the
    reported ``max_diff`` is certified to within ``roundoff``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    Ks = [int(K) for K in Ks]
    Kmax = max(Ks)
    g = cup_coeffs_dd(f, Kmax)
    order = sorted(set(Ks))
    sh, sl = hp.dd_cos_partial_sums(g[:, 0], g[:, 1], t, np.zeros_like(t), order, impl=impl)
    budget = hp.dd_budget(np.abs(g[:, 0]))
    chi = [cup_eval_exact(f, float(x)) for x in t]
    delta = Fraction(f.Delta)
    out = []
    for K in Ks:
        i = order.index(K)
        # exact rational combination; the only rounding left is inside the dd sums
        diff = max(abs(delta + 2 * hp.dd_to_fraction(h, l) - c) for h, l, c in zip(sh[i], sl[i], chi))
        out.append(FourierCheck(K, cup_tail_bound(f, K), float(diff), float(2 * budget[K - 1]), t.size))
    return out


def sample_points(f: CupFunction, n: int, seed: int = 0) -> np.ndarray:
    """Deterministic sample: half inside the support, half anywhere on the circle."""
    rng = np.random.default_rng(seed)
    inner = rng.uniform(-f.Delta, f.Delta, n - n // 2)
    outer = rng.uniform(0.0, 1.0, n // 2)
    return np.concatenate([inner, outer])
