"""Exact desk-scale evaluation of Gamma = Psi - kappa Phi and its sieve chains.

All sums run over primes p in (X/2, X] with t_p = frac(alpha p^2 + beta)
computed exactly from the fixed-point inputs. Each prime contributes
x_p = chi(t_p) log p; the sieve inequalities Psi >= Psi1 and Phi <= Phi1 hold
termwise with integer multipliers, and every sum is a correctly rounded fsum,
so the float comparisons inherit the exact ones.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import hp
from .cup import CupFunction, cup_coeffs_dd, cup_eval_array, cup_eval_exact, tail_bound
from .errors import DomainError, ResourceError, VerificationError
from .expsum.sums import c_from_cup
from .ntcore.factor import (FactorTable, build_factor_table, coprime_mask, mertens_pi,
                            odd_primes_upto)
from .ntcore.fixedreal import FixedReal
from .ntcore.params import Params
from .rosser import NuWeights, RosserWeights, euler_gamma, frak_S0, q_weight, rosser_build
from . import kernels

GAMMA_CAP = 10 ** 7
EPS = 2.0 ** -52
IDENTITY_TOL = 1e-9
IMAG_TOL = 1e-8


def _fsum(v) -> float:
    return math.fsum(np.asarray(v, dtype=np.float64))


# ---- W_p ----------------------------------------------------------------------------

def weight_Wp(p, params: Params, table: FactorTable) -> float:
    """W_p = 1 - kappa sum over primes q | p+2 with z < q <= y of (1 - log q/log y)."""
    n = int(p) + 2
    if n not in table:
        raise DomainError(f"p + 2 = {n} is outside the factor table")
    z, y = params.z, params.y
    total = []
    m = n
    while m > 1:
        q = table.spf_of(m) if m in table else _spf_small(m)
        while m % q == 0:
            m //= q
        if z < q <= y:
            total.append(q_weight(q, y))
    return 1.0 - params.kappa * math.fsum(total)


def _spf_small(m):
    for p in range(2, math.isqrt(m) + 1):
        if m % p == 0:
            return p
    return m


def medium_primes(params: Params) -> np.ndarray:
    """Primes q with z < q <= y."""
    qs = odd_primes_upto(params.y)
    return qs[qs > params.z]


# ---- per-prime data -----------------------------------------------------------------------

@dataclass(eq=False)
class PrimeData:
    """Everything the chains need about the primes of (X/2, X]."""

    X: int
    p: np.ndarray
    logp: np.ndarray
    t: np.ndarray  # float frac(alpha p^2 + beta)
    t_hi: np.ndarray  # dd frac(alpha p^2 + beta)
    t_lo: np.ndarray
    u: np.ndarray  # float frac(alpha p^2), for the c(k) route
    chi: np.ndarray
    x: np.ndarray  # chi * log p
    coprime: np.ndarray
    squarefree: np.ndarray
    Q: np.ndarray  # sum over q | p+2, z < q <= y, of (1 - log q/log y)
    W: np.ndarray  # 1 - kappa Q
    big_omega: np.ndarray
    K: int
    tail: float
    fourier: tuple | None = None  # dd (hi, lo) of 2 sum_{k<=K} g(k) cos(2 pi k t)
    dd_budget: float = 0.0
    residue: np.ndarray | None = field(default=None, repr=False)  # exact r_p as float


def prime_data(params: Params, alpha, beta, cup: CupFunction, table: FactorTable | None = None,
               K: int | None = None, fourier: bool = True) -> PrimeData:
    X = params.X
    if X > GAMMA_CAP:
        raise ResourceError(f"exact Gamma evaluation is capped at X <= {GAMMA_CAP}")
    a = FixedReal.parse(alpha)
    b = FixedReal.parse(beta, a.bits)
    lo = X // 2 + 1
    if table is None or lo not in table or X + 2 not in table:
        table = build_factor_table(lo, X + 3)
    nums = np.arange(lo, X + 1)
    i0 = lo - table.lo
    isp = table.is_prime[i0:i0 + nums.size]
    p = nums[isp]
    shifted = p + 2 - table.lo
    mod = (1 << a.bits) - 1
    ma = [(a.mantissa * int(v) * int(v)) & mod for v in p]
    mb = b.mantissa << (a.bits - b.bits) if b.bits < a.bits else b.mantissa >> (b.bits - a.bits)
    mt = [(m + mb) & mod for m in ma]
    t = np.array([m / (1 << a.bits) for m in mt], dtype=np.float64)
    dd = [hp.mantissa_to_dd(m, a.bits) for m in mt]
    t_hi = np.array([d[0] for d in dd], dtype=np.float64)
    t_lo = np.array([d[1] for d in dd], dtype=np.float64)
    u = np.array([m / (1 << a.bits) for m in ma], dtype=np.float64)
    chi = cup_eval_array(cup, t)
    logp = np.log(p.astype(np.float64))
    sub = [[] for _ in range(p.size)]
    for q in medium_primes(params):
        hit = np.flatnonzero((p + 2) % q == 0)
        wq = q_weight(int(q), params.y)
        for i in hit:
            sub[i].append(wq)
    Q = np.array([math.fsum(s) for s in sub])
    W = 1.0 - params.kappa * Q
    K = cup.H_int if K is None else int(K)
    if K < 1:
        raise DomainError("K must be >= 1")
    data = PrimeData(
        X, p, logp, t, t_hi, t_lo, u, chi, chi * logp,
        coprime_mask(p + 2, params.z), table.mu[shifted] != 0, Q, W,
        table.big_omega[shifted].astype(np.int64), K, tail_bound(cup.Delta, cup.r, K))
    if fourier:
        _attach_fourier(data, cup)
    return data


def _attach_fourier(data: PrimeData, cup: CupFunction):
    """dd partial Fourier sums at t_p and exact per-prime residues r_p.

    r_p = chi(t_p) - Delta - 2 sum_{k<=K} g(k) cos(2 pi k t_p), with chi taken
    exactly at the dd phase; |r_p| <= tail + dd_budget must hold for every p.
    """
    g = cup_coeffs_dd(cup, data.K)
    sh, sl = hp.dd_cos_partial_sums(g[:, 0], g[:, 1], data.t_hi, data.t_lo, [data.K])
    data.fourier = (2 * sh[0], 2 * sl[0])
    # g is itself rounded to dd: add its relative error 2^-104 to the kernel budget
    data.dd_budget = float(2 * hp.dd_budget(np.abs(g[:, 0]))[-1]
                           + 2 * np.abs(g[:, 0]).sum() * 2.0 ** -104)
    delta = Fraction(cup.Delta)
    res = np.empty(data.p.size)
    for i in range(data.p.size):
        t = Fraction(float(data.t_hi[i])) + Fraction(float(data.t_lo[i]))
        c = cup_eval_exact(cup, t)
        s = Fraction(float(data.fourier[0][i])) + Fraction(float(data.fourier[1][i]))
        res[i] = float(c - delta - s)
    data.residue = res
    worst = float(np.abs(res).max(initial=0.0))
    if worst > data.tail + data.dd_budget:
        raise VerificationError("cup-tail", f"per-prime residue {worst:.3e} exceeds tail "
                                f"{data.tail:.3e} + roundoff {data.dd_budget:.3e}")


# ---- chains --------------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainResult:
    first: float  # Psi1 or Phi1
    second: float  # Psi2 or Phi2
    third: complex  # Psi3 or Phi3
    residual: float  # first - Delta (second + Re third), float route
    residual_budget: float
    certified_residual: float  # sum of mult * log p * r_p with exact r_p
    certified_bound: float
    log_mass: float
    exact_side: float  # Psi or Phi
    main_term: float  # (X/2) sum weight/phi
    via_weights: float  # first, recomputed through lambda(d) or nu(m) directly

    @property
    def imag_ratio(self) -> float:
        return abs(self.third.imag) / max(abs(self.third), 1e-300)


def _float_budget(mult_mass, coeffs_abs, tail_mass):
    """A-priori bound for the float route of first - Delta (second + third).

    Phase rounding (2^-53 per frac, amplified by 2 pi k) and kernel arithmetic
    (at most 512 ulps per term with resyncs every 128 steps) per prime, plus
    fsum rounding; this is a floating-point budget, not a certificate.
    """
    k = np.arange(1, coeffs_abs.size + 1)
    per_prime = 2 * float(np.dot(coeffs_abs, 2 * np.pi * k * 2.0 ** -53 + 512 * EPS))
    return tail_mass + mult_mass * (per_prime + 8 * EPS * (2 + 2 * coeffs_abs.sum()))


def _chain(data: PrimeData, mult: np.ndarray, cup: CupFunction, beta, exact_side, main_term,
           via_weights) -> ChainResult:
    """Shared Fourier split for a per-prime integer (or real) multiplier."""
    use = mult != 0
    m, logp = mult[use], data.logp[use]
    first = _fsum(m * data.x[use])
    second = _fsum(m * logp)
    cp, cn = c_from_cup(cup, beta, data.K)
    inner = kernels.phase_series(cp, cn, np.ascontiguousarray(data.u[use]))
    third = complex(_fsum((m * logp) * inner.real), _fsum((m * logp) * inner.imag))
    Delta = cup.Delta
    residual = first - Delta * (second + third.real)
    mass = _fsum(np.abs(m) * logp)
    budget = _float_budget(mass, Delta * np.abs(cp), data.tail * mass)
    if data.residue is not None:
        cert = _fsum(m * logp * data.residue[use])
        cert_bound = (data.tail + data.dd_budget) * mass * (1 + 1e-12)
    else:
        cert, cert_bound = math.nan, math.nan
    return ChainResult(first, second, third, residual, budget, cert, cert_bound, mass,
                       exact_side, main_term, via_weights)


def _lambda_divisor_sums(p, weights: RosserWeights):
    """s_p = sum over d | (p+2, P(z)) of lambda(d), exactly as integers."""
    s = np.zeros(p.size, dtype=np.int64)
    for d, lam in weights.items():
        s[(p + 2) % d == 0] += lam
    return s


def _phi_of_squarefree(d, primes):
    out = 1
    for q in primes:
        if d % q == 0:
            out *= q - 1
    return out


def psi_chain(params: Params, weights: RosserWeights, cup: CupFunction, alpha, beta,
              table: FactorTable | None = None, K: int | None = None,
              data: PrimeData | None = None) -> ChainResult:
    """Psi1 = sum_d lambda^-(d) sum_{p = -2 (d)} chi log p, its split and residual."""
    if weights.kind != "lower":
        raise DomainError("psi_chain needs lower weights")
    data = data or prime_data(params, alpha, beta, cup, table, K)
    s = _lambda_divisor_sums(data.p, weights)
    psi = _fsum(data.x * data.coprime)
    # the same sum through lambda(d) first, as written
    via = math.fsum(lam * _fsum(data.x[(data.p + 2) % d == 0]) for d, lam in weights.items())
    main = data.X / 2 * math.fsum(lam / _phi_of_squarefree(d, weights.primes)
                                  for d, lam in weights.items())
    res = _chain(data, s, cup, beta, psi, main, via)
    if not res.exact_side >= res.first:
        raise VerificationError("psi-ge-psi1", f"Psi = {res.exact_side!r} < Psi1 = {res.first!r}")
    _check_chain(res, "psi")
    return res


def _nu_multipliers(data: PrimeData, nu: NuWeights):
    """Per prime: the Phi term sum_q w_q [coprime] and the Phi1 term sum_q w_q s_{q,p}.

    Both use the same float w_q and an integer multiplier, so Phi <= Phi1
    carries over to the rounded sums.
    """
    groups: dict[int, list[tuple[int, float]]] = {}
    for m, (q, d) in nu.factors.items():
        groups.setdefault(q, []).append((d, m))
    phi_terms, phi1_terms = [], []
    for q in sorted(groups):
        hit = np.flatnonzero((data.p + 2) % q == 0)
        if hit.size == 0:
            continue
        wq = q_weight(q, nu.y)
        lam = rosser_build(nu.z, nu.D / q, "upper")
        s = _lambda_divisor_sums(data.p[hit], lam)
        y = wq * data.x[hit]
        phi_terms.append(y * data.coprime[hit])
        phi1_terms.append(y * s)
    cat = lambda v: np.concatenate(v) if v else np.zeros(0)  # noqa: E731
    return cat(phi_terms), cat(phi1_terms)


def phi_chain(params: Params, nu: NuWeights, cup: CupFunction, alpha, beta,
              table: FactorTable | None = None, K: int | None = None,
              data: PrimeData | None = None) -> ChainResult:
    """Phi1 = sum_m nu(m) sum_{p = -2 (m)} chi log p, its split and residual."""
    data = data or prime_data(params, alpha, beta, cup, table, K)
    phi_terms, phi1_terms = _nu_multipliers(data, nu)
    phi, phi1 = math.fsum(phi_terms), math.fsum(phi1_terms)
    if not phi <= phi1:
        raise VerificationError("phi-le-phi1", f"Phi = {phi!r} > Phi1 = {phi1!r}")
    # per-prime real multiplier sum_m nu(m) [m | p+2]
    mult = np.zeros(data.p.size)
    for m, v in nu.items():
        mult[(data.p + 2) % m == 0] += v
    via = math.fsum(v * _fsum(data.x[(data.p + 2) % m == 0]) for m, v in nu.items())
    main = data.X / 2 * nu.sum_over_phi()
    res = _chain(data, mult, cup, beta, phi, main, via)
    res = ChainResult(phi1, *[getattr(res, f) for f in list(ChainResult.__dataclass_fields__)[1:]])
    if abs(res.via_weights - res.first) > 1e-10 * max(1.0, res.log_mass):
        raise VerificationError("phi1-routes", f"nu route {res.via_weights!r} vs termwise {res.first!r}")
    _check_chain(res, "phi")
    return res


def _check_chain(res: ChainResult, name):
    if abs(res.residual) > res.residual_budget:
        raise VerificationError(f"{name}-residual",
                                f"|{res.residual:.3e}| exceeds budget {res.residual_budget:.3e}")
    if not abs(res.certified_residual) <= res.certified_bound:
        raise VerificationError(f"{name}-certified-residual",
                                f"|{res.certified_residual:.3e}| exceeds {res.certified_bound:.3e}")
    if res.imag_ratio > IMAG_TOL and abs(res.third) > 1e-300:
        raise VerificationError(f"{name}3-real", f"imaginary ratio {res.imag_ratio:.3e}")


# ---- Gamma ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaReport:
    X: int
    mode: str
    params: dict
    alpha: str
    beta: str
    K: int
    tail: float
    n_primes: int
    n_sifted: int
    Gamma: float
    Psi: float
    Phi: float
    identity_rel_error: float
    Gamma1: float
    Gamma2: float
    Gamma3: float
    edge_mass: float  # terms of Gamma1 with X - 2 < p <= X
    Gamma2_ratio: float  # Gamma2 / X^(1 - eta)
    Gamma_fourier: float
    dual_diff: float
    dual_bound: float
    omega_ok: bool
    Psi1: float
    Psi2: float
    Psi3: complex
    Psi_residual: float
    Psi_residual_budget: float
    Psi_certified_residual: float
    Psi_certified_bound: float
    Psi2_main: float
    Phi1: float
    Phi2: float
    Phi3: complex
    Phi_residual: float
    Phi_residual_budget: float
    Phi_certified_residual: float
    Phi_certified_bound: float
    Phi2_main: float
    main_term: float
    S0: float
    Pi_z: float
    fluctuation: float  # Delta |Psi3 - kappa Phi3|

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("Psi3", "Phi3"):
            d[key] = {"re": d[key].real, "im": d[key].imag}
        return d


def gamma_of_X(params: Params, alpha, beta, cup: CupFunction, table: FactorTable | None = None,
               K: int | None = None, weights: RosserWeights | None = None,
               nu: NuWeights | None = None) -> GammaReport:
    """Evaluate Gamma, Psi, Phi and both sieve chains; asserts every finite identity."""
    from .rosser import nu_build

    data = prime_data(params, alpha, beta, cup, table, K)
    weights = weights or rosser_build(params.z, params.D, "lower")
    nu = nu or nu_build(params, check_s1=False)
    kappa = params.kappa
    sel = data.coprime
    gamma = _fsum((data.x * data.W)[sel])
    psi = _fsum(data.x[sel])
    phi = _fsum((data.x * data.Q)[sel])
    rel = abs(gamma - (psi - kappa * phi)) / max(abs(gamma), abs(psi), 1e-300)
    if rel > IDENTITY_TOL:
        raise VerificationError("gamma-identity", f"relative error {rel:.3e}")
    pos = sel & (data.W > 0)
    gamma1 = _fsum((data.x * data.W)[pos])
    if not gamma <= gamma1:
        raise VerificationError("gamma-le-gamma1", f"{gamma!r} > {gamma1!r}")
    gamma2 = _fsum((data.x * data.W)[pos & ~data.squarefree])
    inner = data.p <= data.X - 2
    gamma3 = _fsum((data.x * data.W)[pos & data.squarefree & inner])
    edge = _fsum((data.x * data.W)[pos & ~inner])
    # every Gamma3 prime has Omega(p+2) < 1/kappa + log(p+2)/log y
    g3 = pos & data.squarefree & inner
    bound = (1 / kappa if kappa else math.inf) + np.log((data.p + 2).astype(float)) / math.log(params.y)
    omega_ok = bool(np.all(data.big_omega[g3] < bound[g3]))
    if not omega_ok:
        raise VerificationError("omega-bound", "a Gamma3 prime has Omega(p+2) above the weight bound")
    # dual evaluation: spline against dd Fourier sums
    wl = (data.W * data.logp)[sel]
    fourier_vals = cup.Delta + data.fourier[0][sel] + data.fourier[1][sel]
    gamma_f = _fsum(wl * fourier_vals)
    diff = abs(gamma - gamma_f)
    wmass = _fsum(np.abs(wl))
    dual_bound = (data.tail + data.dd_budget) * wmass + 16 * EPS * _fsum(np.abs(wl) * (1 + np.abs(fourier_vals)))
    if diff > dual_bound:
        raise VerificationError("gamma-dual", f"spline vs Fourier gap {diff:.3e} > {dual_bound:.3e}")
    ps = psi_chain(params, weights, cup, alpha, beta, data=data)
    ph = phi_chain(params, nu, cup, alpha, beta, data=data)
    s0 = frak_S0(params).value
    pi_z = mertens_pi(params.z)
    main = math.exp(euler_gamma()) * cup.Delta * params.X * pi_z * s0
    fluct = cup.Delta * abs(ps.third - kappa * ph.third)
    a = FixedReal.parse(alpha)
    return GammaReport(
        X=params.X, mode=params.mode, params=params.as_dict(), alpha=a.spec,
        beta=FixedReal.parse(beta).spec, K=data.K, tail=data.tail, n_primes=int(data.p.size),
        n_sifted=int(sel.sum()), Gamma=gamma, Psi=psi, Phi=phi, identity_rel_error=rel,
        Gamma1=gamma1, Gamma2=gamma2, Gamma3=gamma3, edge_mass=edge,
        Gamma2_ratio=gamma2 / params.X ** (1 - params.eta), Gamma_fourier=gamma_f,
        dual_diff=diff, dual_bound=dual_bound, omega_ok=omega_ok,
        Psi1=ps.first, Psi2=ps.second, Psi3=ps.third, Psi_residual=ps.residual,
        Psi_residual_budget=ps.residual_budget, Psi_certified_residual=ps.certified_residual,
        Psi_certified_bound=ps.certified_bound, Psi2_main=ps.main_term,
        Phi1=ph.first, Phi2=ph.second, Phi3=ph.third, Phi_residual=ph.residual,
        Phi_residual_budget=ph.residual_budget, Phi_certified_residual=ph.certified_residual,
        Phi_certified_bound=ph.certified_bound, Phi2_main=ph.main_term,
        main_term=main, S0=s0, Pi_z=pi_z, fluctuation=fluct)


def lower_bound_assembly(params: Params, report: GammaReport):
    """Main term e^gamma Delta X Pi(z) S0 next to the measured Gamma and Delta |Psi3 - kappa Phi3|.

    Returns monitor rows; the O-constants are unknown so nothing is asserted.
    """
    from .expsum.monitors import MonitorRow

    inst = f"X={report.X}"
    meta = {"X": report.X, "mode": report.mode, "theta": params.theta, "alpha": report.alpha}
    return [
        MonitorRow.make("Gamma-vs-main", inst, meta, report.Gamma, report.main_term),
        MonitorRow.make("fluctuation-vs-main", inst, meta, report.fluctuation, abs(report.main_term) or 1.0),
        MonitorRow.make("Gamma2-mass", inst, meta, report.Gamma2, params.X ** (1 - params.eta)),
        MonitorRow.make("Psi2-vs-main", inst, meta, report.Psi2, report.Psi2_main),
        MonitorRow.make("Phi2-vs-main", inst, meta, report.Phi2, report.Phi2_main),
    ]


def main_term(params: Params, S0: float | None = None) -> float:
    s0 = frak_S0(params).value if S0 is None else S0
    return math.exp(euler_gamma()) * params.Delta * params.X * mertens_pi(params.z) * s0
