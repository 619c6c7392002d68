import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from primefrac.cup import (
    CupFunction, cup_build, cup_coeff, cup_coeffs, cup_eval, cup_eval_array, cup_eval_exact,
    cup_tail_bound, fourier_partial, fourier_vs_spline, sample_points, tail_bound,
)
from primefrac.errors import DomainError
from primefrac.ntcore import Params


@pytest.fixture(scope="module")
def cup6():
    return cup_build(Params.demo(10 ** 6, 0.3))


@pytest.fixture(scope="module")
def cup4():
    return cup_build(Params.demo(10 ** 4, 0.3))


def test_build_geometry(cup6):
    assert cup6.r == 14 == math.ceil(math.log(10 ** 6))
    assert cup6.Delta == pytest.approx(10 ** -1.8, rel=1e-12)


def test_build_rejects_wide_support():
    with pytest.raises(DomainError):
        cup_build(Params.demo(10 ** 4, 0.1))
    with pytest.raises(DomainError):
        cup_build(Params.demo(50, 0.5))


def test_endpoints(cup6):
    d = cup6.Delta
    assert cup_eval(cup6, d) == 0.0
    assert cup_eval(cup6, -d) == 0.0
    assert cup_eval(cup6, 0.0) == 1.0
    assert cup_eval(cup6, 0.5) == 0.0
    assert cup_eval_exact(cup6, 0.0) == 1
    assert cup_eval_exact(cup6, d) == 0


def test_half_delta_matches_fourier(cup4):
    t = cup4.Delta / 2
    K = cup4.H_int
    assert abs(fourier_partial(cup4, t, K)[0] - cup_eval(cup4, t)) <= cup_tail_bound(cup4, K) + 1e-13


def test_float_eval_matches_exact(cup4):
    ts = sample_points(cup4, 200, seed=3)
    exact = np.array([float(cup_eval_exact(cup4, float(t))) for t in ts])
    assert np.max(np.abs(cup_eval_array(cup4, ts) - exact)) < 1e-12


def test_eval_matches_independent_formula(cup4):
    for t in (0.0, cup4.Delta / 3, -cup4.Delta * 0.9, 0.7):
        assert float(cup_eval_exact(cup4, t)) == pytest.approx(
            float(oracles.cup_value(t, cup4.Delta, cup4.r)), abs=1e-14)


def test_coeff_zero_and_symmetry(cup6):
    assert cup_coeff(cup6, 0) == cup6.Delta
    for k in (1, 7, 100, 5000):
        assert cup_coeff(cup6, k) == cup_coeff(cup6, -k)


def test_coeff_against_quadrature():
    f = cup_build(Params.demo(10 ** 4, 0.3))
    k = math.ceil(1 / f.Delta)
    g = cup_coeff(f, k)
    assert abs(g) <= f.Delta / (math.pi * k * f.Delta)
    assert g == pytest.approx(float(oracles.cup_coeff_quad(k, f.Delta, f.r)), abs=1e-9)
    for kk in (1, 3, 10):
        assert cup_coeff(f, kk) == pytest.approx(float(oracles.cup_coeff_quad(kk, f.Delta, f.r)), abs=1e-9)


def test_tail_bound_paper_mode():
    p = Params.paper(10 ** 6)
    r = math.ceil(math.log(p.X))
    assert tail_bound(p.Delta, r, p.H_int) <= 1 / p.X


def test_tail_bound_monotone(cup4):
    for K in (10, 50, cup4.H_int):
        assert cup_tail_bound(cup4, 2 * K) < cup_tail_bound(cup4, K)


def test_tail_bound_majorises_true_tail():
    Delta, r, K = 0.1, 3, 10
    k = np.arange(K + 1, 10 ** 5 + 1, dtype=np.float64)
    x = np.pi * k * Delta
    true = 2 * np.sum(np.abs(Delta * np.sin(x) / x * (np.sin(x / r) / (x / r)) ** r))
    assert tail_bound(Delta, r, K) >= true
    with pytest.raises(DomainError):
        tail_bound(Delta, r, 0)


def test_fourier_suite_H_and_2H(cup4):
    pts = sample_points(cup4, 1000, seed=0)
    H = cup4.H_int
    for chk in fourier_vs_spline(cup4, pts, [H, 2 * H]):
        assert chk.ok, chk


def test_series_at_zero(cup4):
    K = 2 * cup4.H_int
    assert abs(fourier_partial(cup4, 0.0, K)[0] - 1.0) <= cup_tail_bound(cup4, K) + 1e-12


def test_range_and_dead_zone(cup4):
    rng = np.random.default_rng(0)
    t = rng.uniform(-1, 1, 10 ** 5)
    v = cup_eval_array(cup4, t)
    assert np.all((v >= 0) & (v <= 1))
    u = np.abs(t - np.round(t))
    assert np.all(v[u >= cup4.Delta] == 0.0)


def test_coeff_bound_all_k(cup6):
    g = cup_coeffs(cup6, 10 ** 5)
    assert np.all(np.abs(g) <= cup6.Delta)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.001, 0.2), st.integers(1, 20), st.integers(1, 10 ** 6))
def test_coeff_bound_property(Delta, r, k):
    f = CupFunction(Delta=Delta, r=r, X=1000, H=10.0)
    assert abs(cup_coeff(f, k)) <= Delta
    assert abs(cup_coeff(f, k)) <= Delta / (math.pi * k * Delta) + 1e-300


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3, allow_nan=False))
def test_periodic_and_even(t):
    f = cup_build(Params.demo(10 ** 4, 0.3))
    v = cup_eval(f, t)
    assert v == cup_eval(f, -t)
    assert v == pytest.approx(cup_eval(f, t + 1), abs=1e-12)
