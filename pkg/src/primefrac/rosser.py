"""Rosser-Iwaniec linear sieve weights, the combined weights nu(m), and constant checks."""

from __future__ import annotations

import bisect
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
from scipy import integrate

from .errors import DomainError, ResourceError, VerificationError
from .ntcore.factor import odd_primes_upto
from .ntcore.params import PAPER_S, THETA_MAX, Params, exact

SUPPORT_CAP = 10 ** 7
S0_LOWER_BOUND = Fraction("0.000032113949")
KINDS = ("upper", "lower")

# Euler's constant to 40 digits, from standard tables.
EULER_GAMMA_TABLE = "0.5772156649015328606065120900824024310422"


# ---- weights ------------------------------------------------------------------

@dataclass(frozen=True)
class RosserWeights:
    z: float
    D: float
    kind: str
    primes: tuple[int, ...]
    support: tuple[int, ...]
    signs: tuple[int, ...]

    @cached_property
    def _map(self) -> dict[int, int]:
        return dict(zip(self.support, self.signs))

    def __len__(self):
        return len(self.support)

    def weight(self, d) -> int:
        """lambda(d); zero off the support."""
        return self._map.get(int(d), 0)

    def items(self):
        return zip(self.support, self.signs)


def _omega_parity_sign(k):
    return -1 if k % 2 else 1


def rosser_build(z, D, kind, cap=SUPPORT_CAP) -> RosserWeights:
    """Upper or lower Rosser weights of level D over the odd primes <= z.

    d = p1 p2 ... pk (p1 > ... > pk) is kept when d <= D and
    p1...p_{j-1} p_j^3 < D for every odd j (upper) / every even j (lower);
    then lambda(d) = mu(d). z < 3 gives the trivial support {1}.
    """
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}")
    if not z > 0 or not D >= 1:
        raise DomainError(f"need z > 0 and D >= 1, got z={z}, D={D}")
    primes = [int(p) for p in odd_primes_upto(z)]
    parity = 1 if kind == "upper" else 0
    support, signs = [1], [1]
    # stack of (d, index bound for the next prime, depth)
    stack = [(1, len(primes), 0)]
    while stack:
        d, hi, depth = stack.pop()
        j = depth + 1
        top = bisect.bisect_right(primes, D / d, 0, hi)
        for i in range(top - 1, -1, -1):
            p = primes[i]
            e = d * p
            if e > D:
                continue
            if j % 2 == parity and not d * p ** 3 < D:
                continue
            support.append(e)
            signs.append(_omega_parity_sign(j))
            if len(support) > cap:
                raise ResourceError(f"Rosser support exceeds cap of {cap} divisors")
            stack.append((e, i, j))
    order = np.argsort(support, kind="stable")
    return RosserWeights(float(z), float(D), kind, tuple(primes),
                         tuple(support[i] for i in order), tuple(signs[i] for i in order))


def _prime_set(w: RosserWeights, n):
    n = int(n)
    if n < 1:
        raise DomainError("n must be positive")
    ps, m = [], n
    for p in w.primes:
        if m % p == 0:
            m //= p
            if m % p == 0:
                raise DomainError(f"{n} is not squarefree")
            ps.append(p)
    if m != 1:
        raise DomainError(f"{n} does not divide P(z) for z={w.z}")
    return ps


def divisor_sum(w: RosserWeights, n) -> int:
    """sum_{d | n} lambda(d) for n | P(z)."""
    ps = _prime_set(w, n)
    total = 0
    for mask in range(1 << len(ps)):
        d = 1
        for i, p in enumerate(ps):
            if mask >> i & 1:
                d *= p
        total += w.weight(d)
    return total


def fundamental_check(w: RosserWeights, n) -> bool:
    """Lower: sum_{d|n} lambda <= [n=1]; upper: sum_{d|n} lambda >= [n=1]."""
    s = divisor_sum(w, n)
    target = 1 if int(n) == 1 else 0
    return s <= target if w.kind == "lower" else s >= target


def subset_sums(w: RosserWeights, max_primes=24) -> np.ndarray:
    """sum_{d|n} lambda(d) for every n | P(z), indexed by prime-subset bitmask."""
    k = len(w.primes)
    if k > max_primes:
        raise ResourceError(f"2^{k} divisors of P(z) exceeds the exhaustive limit")
    idx = {p: i for i, p in enumerate(w.primes)}
    f = np.zeros(1 << k, dtype=np.int64)
    for d, s in w.items():
        mask, m = 0, d
        for p in w.primes:
            if m % p == 0:
                mask |= 1 << idx[p]
                m //= p
        f[mask] = s
    # zeta transform over the subset lattice
    for i in range(k):
        bit = 1 << i
        view = f.reshape(-1, 2 * bit)
        view[:, bit:] += view[:, :bit]
    return f


def fundamental_check_all(w: RosserWeights) -> bool:
    sums = subset_sums(w)
    target = np.zeros_like(sums)
    target[0] = 1
    return bool(np.all(sums <= target) if w.kind == "lower" else np.all(sums >= target))


def _phi_squarefree(d, primes):
    out = 1
    for p in primes:
        if d % p == 0:
            out *= p - 1
    return out


def sieve_sum_phi(w: RosserWeights) -> Fraction:
    """Exact sum of lambda(d)/phi(d) over the support."""
    return sum((Fraction(s, _phi_squarefree(d, w.primes)) for d, s in w.items()), Fraction(0))


def truncated_mu_sum_phi(z, D) -> Fraction:
    """Exact sum of mu(d)/phi(d) over d | P(z), d <= D."""
    primes = [int(p) for p in odd_primes_upto(z)]
    total = Fraction(0)
    stack = [(1, 1, 0, len(primes))]
    while stack:
        d, ph, k, hi = stack.pop()
        total += Fraction(-1 if k % 2 else 1, ph)
        for i in range(hi):
            if d * primes[i] > D:
                break
            stack.append((d * primes[i], ph * (primes[i] - 1), k + 1, i))
    return total


# ---- main terms ----------------------------------------------------------------

def euler_gamma_series(digits=40) -> mpmath.mpf:
    """Euler's constant by the Brent-McMillan series (no quadrature)."""
    with mpmath.workdps(digits + 20):
        n = math.ceil(digits * math.log(10) / 4) + 2
        a = -mpmath.log(n)
        u, v = a, mpmath.mpf(1)
        a_k, b_k = a, mpmath.mpf(1)
        k = 1
        while True:
            b_k = b_k * n * n / (k * k)
            a_k = (a_k * n * n / k + b_k) / k
            u += a_k
            v += b_k
            if abs(a_k) < mpmath.mpf(10) ** (-(digits + 15)) and k > n:
                break
            k += 1
        return +(u / v)


def euler_gamma() -> float:
    """gamma after agreement of the series and the tabulated constant to 1e-30."""
    a = euler_gamma_series(40)
    with mpmath.workdps(50):
        b = mpmath.mpf(EULER_GAMMA_TABLE)
        if abs(a - b) > mpmath.mpf("1e-30"):
            raise VerificationError("euler-gamma", f"series {a} vs table {b}")
    return float(b)


def main_term_lower(s) -> float:
    """f(s) = 2 e^gamma log(s - 1) / s, valid for 2 < s < 4."""
    s = float(s)
    if not 2 < s < 4:
        raise DomainError(f"lower main term needs 2 < s < 4, got {s}")
    return 2 * math.exp(euler_gamma()) * math.log(s - 1) / s


def main_term_upper(s1) -> float:
    """F(s1) = 2 e^gamma / s1, valid for 1 < s1 < 3."""
    s1 = float(s1)
    if not 1 < s1 < 3:
        raise DomainError(f"upper main term needs 1 < s1 < 3, got {s1}")
    return 2 * math.exp(euler_gamma()) / s1


# ---- nu(m) --------------------------------------------------------------------

@dataclass(frozen=True)
class NuWeights:
    z: float
    y: float
    D: float
    values: dict = field(repr=False)  # m -> nu(m), nonzero entries only
    factors: dict = field(repr=False)  # m -> (q, d)
    s1_min: float
    s1_max: float

    def __call__(self, m) -> float:
        return self.values.get(int(m), 0.0)

    def items(self):
        return sorted(self.values.items())

    def sum_over_phi(self) -> float:
        """sum_m nu(m)/phi(m), via phi(qd) = (q-1) phi(d)."""
        terms = []
        for m, v in self.values.items():
            q, d = self.factors[m]
            ph = q - 1
            for p in odd_primes_upto(self.z):
                if d % int(p) == 0:
                    ph *= int(p) - 1
            terms.append(v / ph)
        return math.fsum(terms)


def q_weight(q, y) -> float:
    return 1.0 - math.log(q) / math.log(y)


def nu_build(params: Params, check_s1=True) -> NuWeights:
    """Accumulate nu(m) = (1 - log q/log y) lambda_q^+(d) over m = dq.

    lambda_q^+ has level D/q. Each m <= D has at most one (q, d); a second
    representation raises VerificationError.
    """
    z, y, D = params.z, params.y, params.D
    values, factors = {}, {}
    s1s = []
    for q in odd_primes_upto(y):
        q = int(q)
        if not z < q < y:
            continue
        level = D / q
        s1 = math.log(level) / math.log(z)
        s1s.append(s1)
        if check_s1 and not 1 < s1 < 3:
            raise VerificationError("s1-window", f"s1 = {s1:.6f} outside (1, 3) at q = {q}")
        w = rosser_build(z, level, "upper")
        wq = q_weight(q, y)
        for d, lam in w.items():
            m = d * q
            if m in factors:
                raise VerificationError("nu-uniqueness", f"m = {m} from {factors[m]} and {(q, d)}")
            factors[m] = (q, d)
            values[m] = wq * lam
    return NuWeights(z, y, D, values, factors,
                     min(s1s) if s1s else float("nan"), max(s1s) if s1s else float("nan"))


# ---- the constant S0 -------------------------------------------------------------

def _integrand(u, delta, rho):
    return (1.0 / u - 1.0 / rho) / (delta - u)


def s0_integral_closed(delta, rho, eta) -> mpmath.mpf:
    """int_eta^rho (1/u - 1/rho)/(delta - u) du via its antiderivative."""
    d, r, e = (mpmath.mpf(exact(v).numerator) / exact(v).denominator for v in (delta, rho, eta))
    F = lambda u: mpmath.log(u / (d - u)) / d + mpmath.log(d - u) / r  # noqa: E731
    return F(r) - F(e)


def simpson(fn, a, b, panels) -> float:
    """Composite Simpson's rule with an even number of panels."""
    if panels % 2:
        panels += 1
    x = np.linspace(a, b, panels + 1)
    y = fn(x)
    h = (b - a) / panels
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


@dataclass(frozen=True)
class S0Report:
    value: float
    closed_integral: float
    simpson_integral: float
    simpson_integral_fine: float
    adaptive_integral: float
    log_term: float
    meets_lower_bound: bool
    margin: float

    @property
    def quadrature_gap(self) -> float:
        return abs(self.closed_integral - self.simpson_integral)

    @property
    def panel_doubling_gap(self) -> float:
        return abs(self.simpson_integral - self.simpson_integral_fine)


def frak_S0_from(delta, rho, eta, kappa, panels=10 ** 4, tol=1e-9) -> S0Report:
    """log(s-1)/s - kappa eta int_eta^rho (1/u - 1/rho) du/(delta - u).

    Closed form is authoritative; Simpson (panels and 2*panels) and adaptive
    quadrature must agree with it within ``tol``.
    """
    if not 0 < eta <= rho < delta:
        raise DomainError("need 0 < eta <= rho < delta")
    with mpmath.workdps(40):
        q = lambda v: mpmath.mpf(exact(v).numerator) / exact(v).denominator  # noqa: E731
        s = q(delta) / q(eta)
        log_term = mpmath.log(s - 1) / s
        closed = s0_integral_closed(delta, rho, eta) if rho > eta else mpmath.mpf(0)
        value = log_term - q(kappa) * q(eta) * closed
        bound = mpmath.mpf(S0_LOWER_BOUND.numerator) / S0_LOWER_BOUND.denominator
        margin = value - bound
    fn = lambda u: _integrand(u, delta, rho)  # noqa: E731
    if rho > eta:
        simp = simpson(fn, eta, rho, panels)
        simp2 = simpson(fn, eta, rho, 2 * panels)
        adapt = integrate.quad(fn, eta, rho, epsabs=1e-14, epsrel=1e-13)[0]
    else:
        simp = simp2 = adapt = 0.0
    c = float(closed)
    for name, v in (("simpson", simp), ("adaptive", adapt)):
        if abs(v - c) > tol:
            raise VerificationError("S0-quadrature", f"{name} {v!r} vs closed form {c!r}")
    return S0Report(float(value), c, simp, simp2, adapt, float(log_term),
                    bool(margin >= 0), float(margin))


def frak_S0(params: Params, **kw) -> S0Report:
    return frak_S0_from(params.delta, params.rho, params.eta, params.kappa, **kw)


# ---- constant certificate ---------------------------------------------------------

def rational_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: str
    detail: str = ""


@dataclass(frozen=True)
class ConstantsReport:
    checks: tuple[Check, ...]
    mode: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def as_dict(self) -> dict:
        body = {"mode": self.mode, "passed": self.passed,
                "checks": [c.__dict__ for c in self.checks]}
        blob = json.dumps(body, sort_keys=True).encode()
        body["sha256"] = hashlib.sha256(blob).hexdigest()
        return body

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_constants(params: Params, raise_on_fail=False) -> ConstantsReport:
    """Exact-rational certificate of the exponent identities and S0."""
    delta, rho, eta, kappa = (exact(v) for v in (params.delta, params.rho, params.eta, params.kappa))
    theta = exact(params.theta)
    s = delta / eta
    inv = 1 / kappa + 1 / rho
    checks = [
        Check("s-identity", s == PAPER_S, rational_str(s), f"target {rational_str(PAPER_S)}"),
        Check("s-window", 2 < s < 4, rational_str(s), "2 < s < 4"),
        Check("one-over-kappa-plus-one-over-rho", inv < 5, rational_str(inv),
              f"margin 5 - value = {rational_str(5 - inv)} ~ {float(5 - inv):.6e}"),
        Check("theta-bound", 0 < theta < THETA_MAX, rational_str(theta),
              f"0 < theta < {rational_str(THETA_MAX)}"),
    ]
    s0 = frak_S0(params)
    checks.append(Check("S0-bound", s0.meets_lower_bound, repr(s0.value),
                        f"S0 - {S0_LOWER_BOUND} = {s0.margin:.6e}"))
    checks.append(Check("S0-quadrature", s0.quadrature_gap <= 1e-9, repr(s0.quadrature_gap),
                        f"simpson/closed gap; panel doubling gap {s0.panel_doubling_gap:.3e}"))
    checks.append(Check("paper-parameter-set", params.is_paper_parameter_set(),
                        ",".join(rational_str(v) for v in (delta, rho, eta, kappa)),
                        "exponents equal the fixed set"))
    report = ConstantsReport(tuple(checks), params.mode)
    if raise_on_fail and not report.passed:
        bad = report.first_failure
        raise VerificationError(bad.name, f"value {bad.value}; {bad.detail}")
    return report
