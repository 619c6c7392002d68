"""Brute-force evaluation of S(X), the Type I/II sums, the CRT-reduced inner sums, and the thresholds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import kernels
from ..cup import CupFunction, cup_coeffs
from ..errors import DomainError, PrecisionWarning, ResourceError, VerificationError
from ..ntcore.diophantine import Convergent, convergents, crt_pair, solve_linear
from ..ntcore.factor import build_factor_table
from ..ntcore.fixedreal import FixedReal, frac_phases
from ..ntcore.params import Params, exact

S_CAP = 10 ** 7
AXIS_CAP = 10 ** 4
WINDOW_CAP = 10 ** 6
COEFF_SLACK = 1e-12


def _as_fixed(x) -> FixedReal:
    return x if isinstance(x, FixedReal) else FixedReal.parse(x)


def _to64(alpha: FixedReal) -> FixedReal:
    """alpha truncated to 64 fractional bits (exact uint64 phase arithmetic)."""
    if alpha.bits <= 64:
        return alpha
    return FixedReal(alpha.mantissa >> (alpha.bits - 64), 64)


def _xi_items(xi):
    if xi is None:
        return []
    items = xi.items() if hasattr(xi, "items") else xi
    return [(int(d), float(v)) for d, v in items if v != 0]


def coeff_arrays(c) -> tuple[np.ndarray, np.ndarray]:
    """(c_pos, c_neg) with c_pos[k-1] = c(k), c_neg[k-1] = c(-k).

    ``c`` is a mapping k -> c(k) over 0 < |k| <= H, or an existing pair.
    """
    if isinstance(c, tuple) and len(c) == 2:
        cp, cn = (np.asarray(x, dtype=np.complex128) for x in c)
        if cp.shape != cn.shape:
            raise DomainError("c_pos and c_neg must have equal length")
        return cp, cn
    items = dict(c)
    if 0 in items:
        raise DomainError("k = 0 is excluded from the k-range")
    K = max((abs(int(k)) for k in items), default=0)
    cp = np.zeros(K, dtype=np.complex128)
    cn = np.zeros(K, dtype=np.complex128)
    for k, v in items.items():
        (cp if k > 0 else cn)[abs(int(k)) - 1] = v
    return cp, cn


def c_from_cup(cup: CupFunction, beta, K: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """c(k) = g(k) e(beta k) / Delta for 0 < |k| <= K; asserts |c(k)| <= 1."""
    K = cup.H_int if K is None else int(K)
    g = cup_coeffs(cup, K) / cup.Delta
    if np.any(np.abs(g) > 1 + COEFF_SLACK):
        raise VerificationError("c-bound", f"max |c(k)| = {np.abs(g).max():.17g} > 1")
    b = frac_phases(_to64(_as_fixed(beta)), np.arange(1, K + 1))
    e = np.exp(2j * np.pi * b)
    return g * e, g * np.conj(e)


# ---- S(X) --------------------------------------------------------------------------

@dataclass(frozen=True)
class SReport:
    X: int
    value: complex
    n_primes: int
    n_terms: int

    @property
    def normalized(self) -> float:
        """|S(X)| / (X / log^2 X), the ratio monitored along X_j."""
        return abs(self.value) * math.log(self.X) ** 2 / self.X


def prime_divisor_weights(primes, xi) -> np.ndarray:
    """W(p) = sum over d in supp(xi) with p = -2 (mod d) of xi(d)."""
    w = np.zeros(len(primes))
    for d, v in _xi_items(xi):
        w[(primes + 2) % d == 0] += v
    return w


def S_of_X(xi, c, alpha, params: Params) -> SReport:
    """S(X) = sum_d xi(d) sum_{0<|k|<=H} c(k) sum_{p = -2 (d), X/2<p<=X} log p e(alpha p^2 k)."""
    X = params.X
    if X > S_CAP:
        raise ResourceError(f"S(X) brute force is capped at X <= {S_CAP}")
    items = _xi_items(xi)
    for _, v in items:
        if abs(v) > 1 + COEFF_SLACK:
            raise DomainError("|xi(d)| must be <= 1")
    cp, cn = coeff_arrays(c)
    if cp.size and max(np.abs(cp).max(), np.abs(cn).max()) > 1 + COEFF_SLACK:
        raise DomainError("|c(k)| must be <= 1")
    lo = X // 2 + 1
    ps = build_factor_table(lo, X + 1).primes()
    W = prime_divisor_weights(ps, items)
    keep = W != 0
    ps, W = ps[keep], W[keep]
    if ps.size == 0 or cp.size == 0:
        return SReport(X, 0j, 0, 0)
    a = _as_fixed(alpha)
    t = a.phases([int(p) * int(p) for p in ps])
    inner = kernels.phase_series(cp, cn, np.ascontiguousarray(t))
    vals = W * np.log(ps.astype(np.float64)) * inner
    total = complex(math.fsum(vals.real), math.fsum(vals.imag))
    return SReport(X, total, int(ps.size), int(ps.size * cp.size))


# ---- Type I / II ----------------------------------------------------------------------

@dataclass(frozen=True)
class TypeSumSpec:
    """Ranges and coefficients of a Type I (b = None) or Type II sum.

    ``a`` holds a_m for m in (M, M1]; ``b`` holds b_l for l in (L, L1]; a Type I
    sum has b_l = 1.
    """

    X: int
    M: int
    M1: int
    L: int
    L1: int
    a: np.ndarray
    b: np.ndarray | None = None

    @property
    def kind(self) -> str:
        return "TypeI" if self.b is None else "TypeII"


def type_sums_brute(spec: TypeSumSpec, alpha, c, xi) -> complex:
    """Direct evaluation of S_I or S_II.

    sum_m a_m sum_{l, X/2 < ml <= X} b_l sum_k c(k) e(alpha m^2 l^2 k) sum_{d | ml+2} xi(d).
    """
    for lo, hi in ((spec.M, spec.M1), (spec.L, spec.L1)):
        if hi - lo > AXIS_CAP or hi < lo:
            raise ResourceError(f"range ({lo}, {hi}] exceeds the per-axis cap {AXIS_CAP}")
    cp, cn = coeff_arrays(c)
    items = _xi_items(xi)
    if cp.size > AXIS_CAP or len(items) > AXIS_CAP:
        raise ResourceError(f"k- or d-range exceeds the per-axis cap {AXIS_CAP}")
    a = np.asarray(spec.a, dtype=np.complex128)
    b = np.ones(spec.L1 - spec.L) if spec.b is None else np.asarray(spec.b, dtype=np.complex128)
    if a.size != spec.M1 - spec.M or b.size != spec.L1 - spec.L:
        raise DomainError("coefficient arrays must match the ranges")
    if cp.size == 0 or not items:
        return 0j
    m = np.arange(spec.M + 1, spec.M1 + 1, dtype=np.int64)
    l = np.arange(spec.L + 1, spec.L1 + 1, dtype=np.int64)  # noqa: E741
    mm, ll = np.meshgrid(m, l, indexing="ij")
    n = mm * ll
    inside = (2 * n > spec.X) & (n <= spec.X)
    n = n[inside]
    w = (a[:, None] * b[None, :])[inside]
    dw = prime_divisor_weights(n, items)
    w = w * dw
    keep = w != 0
    n, w = n[keep], w[keep]
    if n.size == 0:
        return 0j
    t = _as_fixed(alpha).phases([int(v) * int(v) for v in n])
    inner = kernels.phase_series(cp, cn, np.ascontiguousarray(t))
    vals = w * inner
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


# ---- CRT-reduced inner sums --------------------------------------------------------------

@dataclass(frozen=True)
class CrtV:
    direct: complex
    reduced: complex
    f0: int | None
    modulus: int | None
    count: int

    @property
    def gap(self) -> float:
        return abs(abs(self.direct) - abs(self.reduced))


def crt_reduced_V(alpha, k, l1, l2, d1, d2, window, check: bool = True, tol: float = 1e-9) -> CrtV:
    """The inner sum V over m in (M', M1'] with m l1 + 2 = 0 (d1), m l2 + 2 = 0 (d2).

    ``direct`` filters m by the congruences; ``reduced`` re-indexes m = f0 + r [d1, d2]
    and sums e(alpha (r^2 [d1,d2]^2 + 2 f0 r [d1,d2]) K') with K' = k (l1^2 - l2^2),
    times the constant e(alpha f0^2 K'). Phases use alpha at 64 bits, exactly mod 1.
    """
    Mp, M1p = (int(math.floor(x)) for x in window)
    if M1p - Mp > WINDOW_CAP:
        raise ResourceError(f"window length exceeds {WINDOW_CAP}")
    if min(d1, d2) < 1:
        raise DomainError("moduli must be positive")
    a = _to64(_as_fixed(alpha))
    Kp = int(k) * (l1 * l1 - l2 * l2)
    s1 = solve_linear(l1, -2, d1)
    s2 = solve_linear(l2, -2, d2)
    sol = None if s1 is None or s2 is None else crt_pair(s1[0], s1[1], s2[0], s2[1])
    if sol is None:
        return CrtV(0j, 0j, None, None, 0)
    f0, mod = sol
    m = np.arange(Mp + 1, M1p + 1, dtype=np.int64)
    sel = m[((m * l1 + 2) % d1 == 0) & ((m * l2 + 2) % d2 == 0)]
    direct = complex(np.exp(2j * np.pi * frac_phases(a, sel * sel * Kp)).sum())
    r_lo = (Mp - f0) // mod  # r > (M' - f0)/[d1,d2]
    r_hi = (M1p - f0) // mod
    r = np.arange(r_lo + 1, r_hi + 1, dtype=np.int64)
    ph = frac_phases(a, (r * r * mod * mod + 2 * f0 * r * mod) * Kp)
    const = np.exp(2j * np.pi * float(frac_phases(a, np.array([f0 * f0 * Kp]))[0]))
    reduced = complex(const * np.exp(2j * np.pi * ph).sum())
    out = CrtV(direct, reduced, f0, mod, int(sel.size))
    if check and out.gap > tol:
        raise VerificationError("crt-reduction", f"|direct| - |reduced| = {out.gap:.3e}")
    return out


def crt_grid_check(alpha, dmax=20, lmax=10, kmax=3, window=(0, 1000), tol=1e-9) -> tuple[int, float]:
    """Exhaustive modulus-equality check; returns (instances, worst gap)."""
    worst, count = 0.0, 0
    for d1 in range(1, dmax + 1):
        for d2 in range(1, dmax + 1):
            for l1 in range(1, lmax + 1):
                for l2 in range(1, lmax + 1):
                    for k in range(1, kmax + 1):
                        v = crt_reduced_V(alpha, k, l1, l2, d1, d2, window, check=False)
                        worst = max(worst, v.gap)
                        count += 1
    if worst > tol:
        raise VerificationError("crt-reduction", f"worst gap {worst:.3e} on the grid")
    return count, worst


# ---- thresholds ---------------------------------------------------------------------------

D0_COEFF = Fraction(50, 3)
Q_COEFF = Fraction(4138, 15)


@dataclass(frozen=True)
class Thresholds:
    X: int
    D0_exponent: Fraction
    Q_exponent: Fraction
    D0: float
    Q_target: float


def threshold_exponents(theta) -> tuple[Fraction, Fraction]:
    """Exact exponents (50/3) theta and (4138/15) theta; theta may be the boundary 10/1561."""
    th = exact(theta)
    return D0_COEFF * th, Q_COEFF * th


def thresholds(params: Params) -> Thresholds:
    """D0 = X^((50/3) theta) and Q = X^((4138/15) theta), exponents kept exact."""
    e0, eq = threshold_exponents(params.theta)
    lx = math.log(params.X)
    return Thresholds(params.X, e0, eq, math.exp(float(e0) * lx), math.exp(float(eq) * lx))


def select_convergent(alpha, Q_target: float, max_count: int = 200) -> Convergent | None:
    """First certified convergent with Q >= Q_target, or None if precision runs out."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        convs = convergents(_as_fixed(alpha), max_count)
    for q in convs:
        if q.Q >= Q_target:
            return q
    return None
