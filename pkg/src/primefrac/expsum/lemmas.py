"""Checkers for the exact lemmas (geometric sums, the Fejer-type kernel) and the min-sum monitor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from ..errors import DomainError, VerificationError
from ..ntcore.diophantine import Convergent
from ..ntcore.fixedreal import FixedReal, frac_phases


def _as_fixed(alpha) -> FixedReal:
    return alpha if isinstance(alpha, FixedReal) else FixedReal.parse(alpha)


def _frac_norm_exact(alpha: FixedReal) -> Fraction:
    f = Fraction(alpha.mantissa % (1 << alpha.bits), 1 << alpha.bits)
    return min(f, 1 - f)


# ---- geometric sums -----------------------------------------------------------

@dataclass(frozen=True)
class GeometricCheck:
    total: complex
    closed_form: complex
    bound: float
    ok: bool


def geometric_bound_check(alpha, P: int) -> GeometricCheck:
    """|sum_{1<=n<=P} e(alpha n)| against min(P, 1/(2||alpha||))."""
    P = int(P)
    if P < 1:
        raise DomainError("P must be >= 1")
    a = _as_fixed(alpha)
    phases = frac_phases(a, np.arange(1, P + 1))
    total = complex(np.exp(2j * np.pi * phases).sum())
    norm = _frac_norm_exact(a)
    if norm == 0:
        closed = complex(P)
        bound = float(P)
    else:
        t = float(Fraction(a.mantissa % (1 << a.bits), 1 << a.bits))
        tP = float(frac_phases(a, np.array([P]))[0])
        e1 = np.exp(2j * np.pi * t)
        closed = complex(e1 * (np.exp(2j * np.pi * tP) - 1) / (e1 - 1))
        bound = min(float(P), 1.0 / (2.0 * float(norm)))
    return GeometricCheck(total, closed, bound, abs(total) <= bound + 1e-9)


# ---- kernel --------------------------------------------------------------------

def kernel(theta, M: int, M1: int):
    """K(theta) = min(M1 - M + 1, 1/(pi|theta|), 1/(pi^2 theta^2))."""
    if M1 < M:
        raise DomainError("need M <= M1")
    th = np.abs(np.asarray(theta, dtype=np.float64))
    L = float(M1 - M + 1)
    with np.errstate(divide="ignore"):
        out = np.minimum(L, np.minimum(1.0 / (np.pi * th), 1.0 / (np.pi * th) ** 2))
    return float(out) if out.ndim == 0 else out


def kernel_integral_closed_form(M: int, M1: int) -> float:
    """int_R K = (4 + 2 log(M1 - M + 1)) / pi.

    Split at 1/(pi L) and 1/pi: the three pieces contribute 1/pi, log(L)/pi
    and 1/pi on each side.
    """
    L = M1 - M + 1
    if L < 1:
        raise DomainError("need M <= M1")
    return (4.0 + 2.0 * math.log(L)) / math.pi


def kernel_integral_bound(M: int, M1: int) -> float:
    return 3.0 * math.log(2 + M1 - M)


def _inv_sin2_minus_inv_x2(theta):
    # 1/sin^2(pi t) - 1/(pi t)^2, with a series near 0 to avoid cancellation
    x = np.pi * np.asarray(theta, dtype=np.float64)
    small = np.abs(x) < 1e-2
    out = np.empty_like(x)
    xs = x[small] ** 2
    out[small] = 1.0 / 3 + xs / 15 + 2 * xs ** 2 / 189 + xs ** 3 / 675
    xb = x[~small]
    out[~small] = 1.0 / np.sin(xb) ** 2 - 1.0 / xb ** 2
    return out


def periodized_kernel(theta, M, M1):
    """sum_j K(theta + j) for |theta| <= 1/2, in closed form.

    For j != 0, |theta + j| > 1/pi so K = 1/(pi^2 (theta+j)^2), and
    sum_j 1/(pi^2 (theta+j)^2) = 1/sin^2(pi theta).
    """
    th = np.asarray(theta, dtype=np.float64)
    return _inv_sin2_minus_inv_x2(th) + kernel(th, M, M1)


@dataclass(frozen=True)
class KernelCheck:
    lhs: float
    integral: float
    quad_error: float
    truncated: float | None
    tail: float | None
    kernel_integral: float
    kernel_bound: float
    ok: bool


def _gl_adaptive(fn, edges, tol, nodes=12, max_rounds=40):
    """Vectorized adaptive Gauss-Legendre.

    Each panel is compared with the sum over its two halves; panels whose
    difference exceeds their share of ``tol`` are split. Returns (value, error
    estimate); the error estimate is inf if the round limit is hit.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = fn((mid[:, None] + half[:, None] * x[None, :]).ravel())
        return (vals.reshape(lo.size, nodes) @ w) * half

    lo = np.asarray(edges[:-1], dtype=np.float64)
    hi = np.asarray(edges[1:], dtype=np.float64)
    width = float(hi[-1] - lo[0])
    coarse = rule(lo, hi)
    done, err = 0.0, 0.0
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        fine = left + right
        diff = np.abs(fine - coarse)
        good = diff <= tol * (hi - lo) / width
        done += float(fine[good].sum())
        err += float(diff[good].sum())
        if good.all():
            return done, err
        bad = ~good
        lo, mid, hi = lo[bad], mid[bad], hi[bad]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        coarse = np.concatenate([left[bad], right[bad]])
    return done + float(coarse.sum()), math.inf


def kernel_inequality_check(a, M: int, N: int, N1: int, B: float | None = None,
                            tol: float = 1e-6) -> KernelCheck:
    """|sum_{N<n<=N1} a_n| <= int_R K(theta) |sum_{M<m<=M1} a_m e(theta m)| dtheta.

    ``a`` holds a_m for m = M+1..M1. The integral over R is evaluated by
    folding onto one period with the periodized kernel, using adaptive
    Gauss-Legendre to an estimated accuracy of tol/10.
    If B is given the truncated integral over [-B, B] and its analytic tail
    bound are reported as well.
    """
    a = np.asarray(a, dtype=np.complex128)
    M1 = M + a.size
    if not (M <= N < N1 <= M1):
        raise DomainError("need M <= N < N1 <= M1")
    m = np.arange(M + 1, M1 + 1, dtype=np.float64)
    lhs = float(abs(a[N - M:N1 - M].sum()))

    def absA(th):
        return np.abs(np.exp(2j * np.pi * np.outer(th, m)) @ a)

    L = M1 - M + 1
    b1, b2 = 1.0 / (np.pi * L), 1.0 / np.pi
    edges = [-0.5, -b2, -b1, 0.0, b1, b2, 0.5]
    fold = lambda th: absA(th) * periodized_kernel(th, M, M1)  # noqa: E731
    integral, qerr = _gl_adaptive(fold, edges, tol / 10)
    truncated = tail = None
    if B is not None:
        if B < 1:
            raise DomainError("B must be >= 1")
        nB = math.floor(B)
        tedges = sorted(set(np.arange(-nB, nB + 1, dtype=float)) | {-b2, -b1, 0.0, b1, b2})
        truncated = _gl_adaptive(lambda th: absA(th) * kernel(th, M, M1), tedges, tol / 10)[0]
        # int_{|theta|>B} (pi theta)^-2 max|A| <= 2 max|A| / (pi^2 B)
        tail = 2.0 * float(np.abs(a).sum()) / (np.pi ** 2 * nB)
    kint = kernel_integral_closed_form(M, M1)
    kb = kernel_integral_bound(M, M1)
    ok = qerr <= tol and lhs <= integral + tol and kint <= kb
    return KernelCheck(lhs, integral, qerr, truncated, tail, kint, kb, ok)


def kernel_integral_numeric(M, M1) -> float:
    """Independent quadrature of int_R K used as an oracle for the closed form."""
    L = M1 - M + 1
    a, b = 1 / (np.pi * L), 1 / np.pi
    one = integrate.quad(lambda t: kernel(t, M, M1), 0, a)[0]
    one += integrate.quad(lambda t: kernel(t, M, M1), a, b)[0]
    one += integrate.quad(lambda t: kernel(t, M, M1), b, np.inf)[0]
    return 2 * one


# ---- min-sum monitor --------------------------------------------------------------

@dataclass(frozen=True)
class MinSumDiagnostic:
    lhs: float
    rhs_shape: float
    q: int

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_shape


def min_sum_diagnostic(alpha, conv: Convergent, Y1, Y2) -> MinSumDiagnostic:
    """sum_{n<=Y1} min(Y1 Y2/n, 1/||alpha n||) versus Y1 Y2 (1/q + 1/Y2 + q/(Y1 Y2)) log(2 Y1 q)."""
    if Y1 < 1 or Y2 < 1:
        raise DomainError("need Y1, Y2 >= 1")
    a = _as_fixed(alpha)
    if conv.error_bound(a) > Fraction(1, conv.Q ** 2):
        raise DomainError(f"{conv.A}/{conv.Q} is not within q^-2 of alpha")
    n = np.arange(1, math.floor(Y1) + 1)
    if a.is_rational and a.source.denominator <= n[-1]:
        raise DomainError(f"||alpha n|| = 0 at n = {a.source.denominator}; alpha is rational on this range")
    ms = a.frac_mantissas(n)
    mod = 1 << a.bits
    norms = np.array([min(m, mod - m) for m in ms], dtype=object)
    if np.any(norms == 0):
        raise DomainError("||alpha n|| = 0 encountered; alpha is rational on this range")
    inv = np.array([mod / int(x) for x in norms], dtype=np.float64)
    lhs = math.fsum(np.minimum(Y1 * Y2 / n, inv))
    q = conv.Q
    rhs = Y1 * Y2 * (1 / q + 1 / Y2 + q / (Y1 * Y2)) * math.log(2 * Y1 * q)
    return MinSumDiagnostic(lhs, rhs, q)


def assert_geometric_trials(trials: int, max_P: int, seed: int) -> int:
    """Run randomized geometric checks; returns the number of failures."""
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(trials):
        alpha = FixedReal.from_fraction(Fraction(float(rng.random())), 64)
        res = geometric_bound_check(alpha, int(rng.integers(1, max_P + 1)))
        if not res.ok:
            fails += 1
        if abs(res.total - res.closed_form) > 1e-7 * max(1.0, abs(res.total)):
            raise VerificationError("geometric-closed-form", f"{res.total} vs {res.closed_form}")
    return fails
