import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from primefrac.errors import DomainError, ResourceError
from primefrac.ntcore import Params
from primefrac.ntcore.params import PAPER_RHO, PAPER_S
from primefrac.rosser import (
    divisor_sum, euler_gamma, euler_gamma_series, frak_S0, frak_S0_from, fundamental_check,
    fundamental_check_all, main_term_lower, main_term_upper, nu_build, q_weight, rosser_build,
    sieve_sum_phi, subset_sums, truncated_mu_sum_phi, verify_constants,
)

GRID = [(10, 30), (20, 100), (50, 10 ** 4)]


def test_upper_example():
    w = rosser_build(10, 30, "upper")
    assert w.weight(3) == -1
    assert w.weight(5) == 0
    assert w.weight(1) == 1


def test_lower_example():
    w = rosser_build(10, 30, "lower")
    assert w.weight(5) == -1
    assert w.support == (1, 3, 5, 7)


@pytest.mark.parametrize("z,D", GRID)
@pytest.mark.parametrize("kind", ["upper", "lower"])
def test_unit_weight_at_one(z, D, kind):
    assert rosser_build(z, D, kind).weight(1) == 1


def test_fundamental_examples():
    lo, up = rosser_build(10, 30, "lower"), rosser_build(10, 30, "upper")
    assert divisor_sum(lo, 1) == divisor_sum(up, 1) == 1
    assert divisor_sum(lo, 105) == -2 and fundamental_check(lo, 105)
    assert divisor_sum(up, 15) == 0 and fundamental_check(up, 15)
    with pytest.raises(DomainError):
        fundamental_check(lo, 11)
    with pytest.raises(DomainError):
        fundamental_check(lo, 9)


def test_sieve_sum_phi_examples():
    assert sieve_sum_phi(rosser_build(10, 30, "lower")) == Fraction(1, 12)
    assert sieve_sum_phi(rosser_build(3, 2, "lower")) == 1
    assert sieve_sum_phi(rosser_build(10, 30, "upper")) == Fraction(1, 2)


@pytest.mark.parametrize("z,D", GRID)
@pytest.mark.parametrize("kind", ["upper", "lower"])
def test_fundamental_exhaustive(z, D, kind):
    w = rosser_build(z, D, kind)
    assert fundamental_check_all(w)
    # cross-check the subset transform against direct divisor enumeration
    sums = subset_sums(w)
    for n in oracles.divisors_of_squarefree(list(w.primes))[:300]:
        mask = sum(1 << i for i, p in enumerate(w.primes) if n % p == 0)
        assert sums[mask] == divisor_sum(w, n)


@pytest.mark.parametrize("z,D", GRID)
@pytest.mark.parametrize("kind", ["upper", "lower"])
def test_support_shape(z, D, kind):
    w = rosser_build(z, D, kind)
    assert all(abs(s) == 1 for _, s in w.items())
    assert all(1 <= d <= D for d in w.support)
    supp = set(w.support)
    for d, s in w.items():
        fac = oracles.factor(d)
        assert all(e == 1 for e in fac.values())
        assert s == oracles.mobius(d)
        ps = sorted(fac, reverse=True)
        prefix = 1
        for p in ps:
            prefix *= p
            assert prefix in supp


@pytest.mark.parametrize("z,D", GRID)
def test_lower_sum_below_truncated_mu(z, D):
    assert sieve_sum_phi(rosser_build(z, D, "lower")) <= truncated_mu_sum_phi(z, D)


def test_support_cap():
    with pytest.raises(ResourceError):
        rosser_build(200, 10 ** 6, "upper", cap=100)


@settings(max_examples=40, deadline=None)
@given(st.floats(3, 40), st.floats(1, 2000), st.sampled_from(["upper", "lower"]))
def test_fundamental_property(z, D, kind):
    # the lower inequality needs every prime <= z to be <= D (else n = p sums to 1)
    if kind == "lower":
        D = max(D, z)
    assert fundamental_check_all(rosser_build(z, D, kind))


def test_lower_below_z_degenerate():
    w = rosser_build(3, 2, "lower")
    assert w.support == (1,)
    assert divisor_sum(w, 3) == 1 and not fundamental_check(w, 3)


# ---- main terms and gamma -------------------------------------------------------

def test_euler_gamma_two_sources():
    with mpmath.workdps(50):
        assert abs(euler_gamma_series(40) - mpmath.euler) < mpmath.mpf("1e-35")
    assert euler_gamma() == pytest.approx(0.5772156649015329, abs=1e-16)


def test_main_terms():
    assert main_term_upper(2) == pytest.approx(math.exp(0.5772156649015329), rel=1e-15)
    assert main_term_upper(2) == pytest.approx(1.78107241799, rel=1e-11)
    s = float(PAPER_S)
    with mpmath.workdps(30):
        ref = 2 * mpmath.exp(mpmath.euler) * mpmath.log(s - 1) / s
    assert abs(main_term_lower(s) - float(ref)) < 1e-12
    assert main_term_lower(2 + 1e-12) < 1e-10
    for bad in (2, 4.5):
        with pytest.raises(DomainError):
            main_term_lower(bad)
    with pytest.raises(DomainError):
        main_term_upper(3)


# ---- nu ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def nu6():
    return Params.demo_sieve(10 ** 6), nu_build(Params.demo_sieve(10 ** 6))


def test_nu_vanishes_below_z(nu6):
    p, nu = nu6
    assert all(nu(m) == 0 for m in range(1, math.floor(p.z) + 1))


def test_nu_prime_values(nu6):
    p, nu = nu6
    for q in range(math.floor(p.z) + 1, math.ceil(p.y)):
        if oracles.is_prime(q) and q % 2:
            assert nu(q) == pytest.approx(q_weight(q, p.y), rel=1e-15)
            assert 0 < nu(q) < 1


def test_nu_bounded_and_unique(nu6):
    p, nu = nu6
    assert all(abs(v) <= 1 for v in nu.values.values())
    assert all(m <= p.D for m in nu.values)
    for m, (q, d) in nu.factors.items():
        assert m == q * d and p.z < q < p.y
        assert all(r % 2 and r <= p.z for r in oracles.factor(d))
    assert 1 < nu.s1_min <= nu.s1_max < 3


# ---- S0 and the constant certificate -------------------------------------------

def test_S0_paper():
    r = frak_S0(Params.paper(10 ** 6))
    assert r.value >= 0.000032113949
    assert r.value == pytest.approx(3.2113949005e-5, abs=1e-15)
    assert r.quadrature_gap <= 1e-9
    assert r.panel_doubling_gap <= 1e-12
    assert abs(r.adaptive_integral - r.closed_integral) <= 1e-9


def test_S0_closed_form_independent():
    d, rho, eta, kap = (mpmath.mpf(x) for x in ("0.307708", "0.23077", "0.076928", "1.4999676"))
    with mpmath.workdps(40):
        integral = mpmath.quad(lambda u: (1 / u - 1 / rho) / (d - u), [eta, rho])
        s = d / eta
        ref = mpmath.log(s - 1) / s - kap * eta * integral
    assert frak_S0(Params.paper(10 ** 6)).value == pytest.approx(float(ref), abs=1e-14)


def test_S0_degenerate_window():
    r = frak_S0_from(0.307708, 0.076928, 0.076928, 1.4999676)
    s = 0.307708 / 0.076928
    assert r.closed_integral == 0.0
    assert r.value == pytest.approx(math.log(s - 1) / s, rel=1e-14)


def test_verify_constants_paper():
    rep = verify_constants(Params.paper(10 ** 6))
    assert rep.passed
    assert rep["s-identity"].value == "76927/19232"
    inv = 1 / Fraction("1.4999676") + 1 / PAPER_RHO
    assert rep["one-over-kappa-plus-one-over-rho"].value == f"{inv.numerator}/{inv.denominator}"
    assert 5 - inv == Fraction(3815, 86536880763)


@pytest.mark.parametrize("kappa", [1.5, 1.51])
def test_verify_constants_kappa_mutation(kappa):
    rep = verify_constants(Params(X=10 ** 6, theta=0.003, kappa=kappa))
    inv = 1 / Fraction(str(kappa)) + 1 / PAPER_RHO
    chk = rep["one-over-kappa-plus-one-over-rho"]
    assert chk.value == f"{inv.numerator}/{inv.denominator}"
    assert chk.passed == (inv < 5)
    assert rep["s-identity"].passed
    assert not rep.passed
    if kappa == 1.5:
        assert inv == Fraction(2, 3) + Fraction(100000, 23077)
    else:
        assert rep.first_failure.name == "S0-bound"
