import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from primefrac.cup import cup_build
from primefrac.errors import DomainError, ResourceError
from primefrac.expsum import (
    DecompParams, S_of_X, TypeSumSpec, assert_geometric_trials, c_from_cup, coeff_arrays,
    crt_grid_check, crt_reduced_V, decompose_lambda_sum, direct_lambda_sum, evaluate_pieces,
    geometric_bound_check, kernel, kernel_inequality_check, kernel_integral_bound,
    kernel_integral_closed_form, kernel_integral_numeric, min_sum_diagnostic, select_convergent,
    threshold_exponents, thresholds, type_sums_brute,
)
from primefrac.ntcore import FixedReal, Params, convergents
from primefrac.ntcore.diophantine import Convergent
from primefrac.ntcore.params import THETA_MAX


# ---- geometric bound ----------------------------------------------------------------

def test_geometric_integer_alpha():
    r = geometric_bound_check(FixedReal.parse("3"), 10)
    assert abs(r.total - 10) < 1e-12 and r.bound == 10 and r.ok


def test_geometric_half():
    r = geometric_bound_check(FixedReal.parse("1/2"), 4)
    assert abs(r.total) < 1e-12 and r.bound == 1 and r.ok


def test_geometric_trials():
    assert assert_geometric_trials(500, 1000, seed=7) == 0


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 1, max_denominator=10 ** 6), st.integers(1, 1000))
def test_geometric_property(alpha, P):
    r = geometric_bound_check(FixedReal.from_fraction(alpha, 64), P)
    direct = sum(cmath.exp(2j * math.pi * float(alpha * n % 1)) for n in range(1, P + 1))
    assert abs(r.total - direct) < 1e-8
    assert r.ok


# ---- kernel lemma -------------------------------------------------------------------

def test_kernel_at_zero():
    assert kernel(0.0, 5, 12) == 8


def test_kernel_integral_closed_vs_quadrature():
    for M, M1 in [(0, 0), (3, 10), (0, 100), (5, 1005)]:
        L = M1 - M + 1
        with mpmath.workdps(30):
            k = lambda t: min(L, 1 / (mpmath.pi * t), 1 / (mpmath.pi * t) ** 2)  # noqa: E731
            ref = 2 * mpmath.quad(k, [0, 1 / (mpmath.pi * L), 1 / mpmath.pi, mpmath.inf])
        assert kernel_integral_closed_form(M, M1) == pytest.approx(float(ref), rel=1e-10)
        assert kernel_integral_numeric(M, M1) == pytest.approx(float(ref), rel=1e-8)


def test_kernel_integral_bound_all_lengths():
    for span in range(0, 1001):
        assert kernel_integral_closed_form(0, span) <= kernel_integral_bound(0, span)


def test_kernel_inequality_constant_sequence():
    a = np.ones(12)
    r = kernel_inequality_check(a, 0, 0, 12)
    assert r.lhs == pytest.approx(12.0)
    assert r.ok and r.integral >= r.lhs


def test_kernel_inequality_truncation_reported():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    r = kernel_inequality_check(a, 10, 12, 16, B=20)
    assert r.ok
    assert r.truncated <= r.integral + 1e-6
    assert r.integral <= r.truncated + r.tail + 1e-6


def test_kernel_inequality_random_trials():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 65))
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        M = int(rng.integers(0, 50))
        N = M + int(rng.integers(0, n))
        N1 = int(rng.integers(N + 1, M + n + 1))
        assert kernel_inequality_check(a, M, N, N1, tol=1e-6).ok


def test_kernel_inequality_window_error():
    with pytest.raises(DomainError):
        kernel_inequality_check(np.ones(4), 0, 3, 9)


# ---- min-sum diagnostic -------------------------------------------------------------

def test_min_sum_single_term():
    a = FixedReal.from_tag("sqrt2")
    q = convergents(a, 3)[2]
    d = min_sum_diagnostic(a, q, 1, 50)
    norm = float(oracles.frac_norm_mp("sqrt2", "0", 1)[1])
    assert d.lhs == pytest.approx(min(50, 1 / norm), rel=1e-14)


def _norm_n_sqrt2(n):
    with mpmath.workdps(40):
        v = n * mpmath.sqrt(2)
        return abs(v - mpmath.nint(v))


def test_min_sum_sqrt2_q29():
    a = FixedReal.from_tag("sqrt2")
    d = min_sum_diagnostic(a, Convergent(41, 29), 100, 100)
    assert math.isfinite(d.ratio) and d.ratio > 0
    ref = math.fsum(min(100 * 100 / n, 1 / float(_norm_n_sqrt2(n))) for n in range(1, 101))
    assert d.lhs == pytest.approx(ref, rel=1e-9)


def test_min_sum_rational_alpha():
    with pytest.raises(DomainError):
        min_sum_diagnostic(FixedReal.parse("1/3"), Convergent(1, 3), 10, 10)


def test_min_sum_bad_convergent():
    with pytest.raises(DomainError):
        min_sum_diagnostic(FixedReal.from_tag("sqrt2"), Convergent(3, 7), 10, 10)


# ---- decomposition ------------------------------------------------------------------

def _dp(X):
    return DecompParams.from_params(Params.demo(X, 0.3))


def test_decomposition_constant_f():
    X = 100
    dec = decompose_lambda_sum(lambda n: np.ones(n.shape), _dp(X))
    ref = sum(oracles.mangoldt(n) for n in range(51, 101))
    assert abs(dec.total - ref) <= 1e-10 * ref


def test_decomposition_sqrt2_phase():
    X = 1000
    f = lambda n: np.exp(2j * np.pi * n * math.sqrt(2))  # noqa: E731
    dec = decompose_lambda_sum(f, _dp(X))
    ref = oracles.direct_lambda_sum(lambda n: cmath.exp(2j * math.pi * n * math.sqrt(2)), X)
    assert abs(dec.total - ref) <= 1e-8 * abs(ref)


def test_decomposition_zero_f():
    dec = decompose_lambda_sum(lambda n: np.zeros(n.shape), _dp(1000))
    assert dec.total == 0
    assert all(p.evaluate(np.zeros(500), 501) == 0 for p in dec.pieces)


def test_decomposition_pieces_shape():
    dec = decompose_lambda_sum(None, _dp(10 ** 4), verify=False)
    counts = dec.counts()
    assert sum(counts.values()) == len(dec.pieces) > 0
    for p in dec.pieces:
        assert p.kind in ("TypeI", "TypeII", "boundary")
        assert p.M < p.M1 or p.M1 == p.M == 1 or p.M1 >= p.M
        assert "params" in p.flags


def test_decomposition_strict_rejects_desk_params():
    with pytest.raises(DomainError):
        decompose_lambda_sum(None, _dp(10 ** 4), strict=True)


def test_decomposition_cap():
    with pytest.raises(ResourceError):
        decompose_lambda_sum(None, DecompParams(1, 2, 3.5, 10 ** 7))


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 3000), st.integers(0, 2 ** 32 - 1))
def test_decomposition_identity_property(X, seed):
    phases = np.random.default_rng(seed).random(X + 1)
    f = lambda n: np.exp(2j * np.pi * phases[n])  # noqa: E731
    dec = decompose_lambda_sum(f, DecompParams(1.0, 2.0, 3.5, X))
    ref = direct_lambda_sum(f, X)
    assert abs(dec.total - ref) <= 1e-9 * max(1.0, abs(ref))
    g = lambda n: np.exp(-2j * np.pi * phases[n])  # noqa: E731
    assert abs(evaluate_pieces(dec, g) - ref.conjugate()) <= 1e-9 * max(1.0, abs(ref))


# ---- S(X) and Type sums --------------------------------------------------------------

def test_S_of_X_small():
    p = Params.demo(20, 0.3)
    rep = S_of_X({1: 1.0}, {1: 1.0, -1: 1.0}, "sqrt2", p)
    with mpmath.workdps(40):
        a = mpmath.sqrt(2)
        ref = sum(2 * mpmath.log(q) * mpmath.cos(2 * mpmath.pi * a * q * q) for q in (11, 13, 17, 19))
    assert rep.n_primes == 4
    assert rep.value.real == pytest.approx(float(ref), abs=1e-12)
    assert abs(rep.value.imag) < 1e-12


def test_S_of_X_zero_xi():
    assert S_of_X({}, {1: 1.0}, "sqrt2", Params.demo(1000, 0.3)).value == 0


def test_S_of_X_with_divisor_weights():
    p = Params.demo(2000, 0.3)
    xi = {1: 1.0, 3: -1.0, 5: -1.0}
    c = {1: 0.5, -1: 0.5, 2: 0.25j, -2: -0.25j}
    rep = S_of_X(xi, c, "golden", p)
    ref = 0j
    for q in range(1001, 2001):
        if oracles.is_prime(q):
            w = sum(v for d, v in xi.items() if (q + 2) % d == 0)
            t = float(oracles.frac_norm_mp("golden", "0", q)[0])
            ref += w * math.log(q) * sum(ck * cmath.exp(2j * math.pi * k * t) for k, ck in c.items())
    assert abs(rep.value - ref) < 1e-9


def test_c_from_cup_bounded():
    cup = cup_build(Params.demo(10 ** 4, 0.3))
    cp, cn = c_from_cup(cup, "0.1")
    assert np.all(np.abs(cp) <= 1) and np.all(np.abs(cn) <= 1)
    assert np.allclose(cp, np.conj(cn))


def test_c_from_cup_rejects_large():
    cup = cup_build(Params.demo(10 ** 4, 0.3))
    cp, cn = c_from_cup(cup, "0")
    with pytest.raises(DomainError):
        S_of_X({1: 1.0}, (cp * 2, cn * 2), "sqrt2", Params.demo(1000, 0.3))


def test_coeff_arrays_rejects_k0():
    with pytest.raises(DomainError):
        coeff_arrays({0: 1.0})


def test_type_sum_empty_k_range():
    spec = TypeSumSpec(1000, 10, 20, 50, 100, np.ones(10))
    assert type_sums_brute(spec, "sqrt2", {}, {1: 1.0}) == 0


def test_type_two_collapses_to_double_sum():
    X, M, M1, L, L1 = 2000, 20, 40, 25, 50
    rng = np.random.default_rng(2)
    a = rng.standard_normal(M1 - M)
    b = rng.standard_normal(L1 - L)
    c = {1: 0.3, -1: 0.3, 3: 0.1, -3: 0.1}
    got = type_sums_brute(TypeSumSpec(X, M, M1, L, L1, a, b), "sqrt2", c, {1: 1.0})
    ref = 0j
    for i, m in enumerate(range(M + 1, M1 + 1)):
        for j, l in enumerate(range(L + 1, L1 + 1)):
            n = m * l
            if X < 2 * n <= 2 * X:
                t = float(oracles.frac_norm_mp("sqrt2", "0", n)[0])
                ref += a[i] * b[j] * sum(ck * cmath.exp(2j * math.pi * k * t) for k, ck in c.items())
    assert abs(got - ref) < 1e-9


def test_type_sum_conjugate_symmetry():
    rng = np.random.default_rng(4)
    spec = TypeSumSpec(3000, 30, 60, 40, 80, rng.standard_normal(30), rng.standard_normal(40))
    c = {1: 0.5, -1: 0.5, 2: 0.2, -2: 0.2}
    xi = {1: 1.0, 3: -1.0}
    s = type_sums_brute(spec, "sqrt2", c, xi)
    s_neg = type_sums_brute(spec, "-sqrt2", c, xi)
    assert abs(s_neg - s.conjugate()) < 1e-9


def test_type_sum_axis_cap():
    with pytest.raises(ResourceError):
        type_sums_brute(TypeSumSpec(10 ** 9, 0, 20000, 1, 2, np.ones(20000)), "sqrt2", {1: 1}, {1: 1})


# ---- CRT reduction ------------------------------------------------------------------

def test_crt_identity_reindexing():
    v = crt_reduced_V("sqrt2", 2, 3, 5, 1, 1, (0, 200))
    assert v.modulus == 1 and v.count == 200
    assert abs(v.direct - v.reduced) < 1e-9


def test_crt_equal_l():
    v = crt_reduced_V("sqrt2", 1, 4, 4, 3, 7, (0, 1000))
    assert abs(abs(v.direct) - v.count) < 1e-9


def test_crt_example():
    v = crt_reduced_V("sqrt2", 1, 1, 2, 3, 5, (0, 1000))
    assert v.gap <= 1e-9 and v.count > 0


def test_crt_unsolvable():
    v = crt_reduced_V("sqrt2", 1, 3, 1, 3, 5, (0, 100))
    assert v.direct == v.reduced == 0 and v.f0 is None


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 10), st.integers(1, 10),
       st.integers(1, 3), st.sampled_from(["sqrt2", "golden", "e"]))
def test_crt_property(d1, d2, l1, l2, k, tag):
    v = crt_reduced_V(tag, k, l1, l2, d1, d2, (0, 1000))
    assert v.gap <= 1e-9
    assert v.count == sum(1 for m in range(1, 1001) if (m * l1 + 2) % d1 == 0 and (m * l2 + 2) % d2 == 0)


def test_crt_grid_small():
    n, worst = crt_grid_check("sqrt2", dmax=6, lmax=4, kmax=2)
    assert n == 6 * 6 * 4 * 4 * 2 and worst <= 1e-9


# ---- thresholds ---------------------------------------------------------------------

def test_thresholds_zero_theta():
    assert threshold_exponents(0) == (0, 0)
    t = thresholds(Params(X=10 ** 6, theta=1e-15, mode="paper"))
    assert t.D0 == pytest.approx(1.0) and t.Q_target == pytest.approx(1.0)


def test_thresholds_example():
    t = thresholds(Params.paper(10 ** 6, 0.006))
    assert t.D0 == pytest.approx(10 ** 0.6, rel=1e-12)
    assert t.Q_target == pytest.approx(10 ** (6 * 4138 / 15 * 0.006), rel=1e-12)


def test_threshold_exponents_paper_boundary():
    assert threshold_exponents(THETA_MAX) == (Fraction(500, 4683), Fraction(8276, 4683))


def test_select_convergent():
    q = select_convergent("sqrt2", 100)
    assert q.Q == 169
    assert select_convergent(FixedReal.from_tag("sqrt2", 32), 1e30) is None
