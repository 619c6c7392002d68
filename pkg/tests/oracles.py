"""Independent brute-force oracles used by the tests.

Nothing here imports the package under test: trial division, mpmath at high
precision and plain Python loops only.
"""

import math
from fractions import Fraction

import mpmath

TAG_VALUES = {
    "sqrt2": lambda: mpmath.sqrt(2),
    "golden": lambda: (1 + mpmath.sqrt(5)) / 2,
    "e": lambda: mpmath.e,
    "pi": lambda: mpmath.pi,
}


def real_value(spec, dps=80):
    """mpmath value of a tag, decimal string or ratio."""
    with mpmath.workdps(dps):
        if spec in TAG_VALUES:
            return +TAG_VALUES[spec]()
        return mpmath.mpf(Fraction(spec).numerator) / Fraction(spec).denominator


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor(n):
    out, f = {}, 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def big_omega(n):
    return sum(factor(n).values())


def mobius(n):
    fac = factor(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def totient(n):
    out = n
    for p in factor(n):
        out = out // p * (p - 1)
    return out


def mangoldt(n):
    fac = factor(n)
    return math.log(next(iter(fac))) if len(fac) == 1 else 0.0


def frac_norm_mp(alpha, beta, p, dps=80):
    with mpmath.workdps(dps):
        v = real_value(alpha, dps) * p * p + real_value(beta, dps)
        f = v - mpmath.floor(v)
        return f, min(f, 1 - f)


def scalar_scan(alpha, beta, theta, lo, hi, z=None, dps=80):
    """Accepted primes of (lo, hi]: ||alpha p^2 + beta|| < p^-theta and Omega(p+2) <= 4.

    With ``z`` set, p+2 must also have no odd prime factor <= z.
    """
    out = []
    with mpmath.workdps(dps):
        th = mpmath.mpf(Fraction(theta).numerator) / Fraction(theta).denominator
        for p in range(lo + 1, hi + 1):
            if not is_prime(p):
                continue
            _, norm = frac_norm_mp(alpha, beta, p, dps)
            if not norm < mpmath.power(p, -th):
                continue
            fac = factor(p + 2)
            if sum(fac.values()) > 4:
                continue
            if z is not None and any(q % 2 and q <= z for q in fac):
                continue
            out.append(p)
    return out


def divisors_of_squarefree(primes):
    out = [1]
    for p in primes:
        out += [d * p for d in out]
    return out


def direct_lambda_sum(f, X):
    return sum(mangoldt(n) * f(n) for n in range(X // 2 + 1, X + 1))


def irwin_hall_cdf(x, r):
    """P(U_1 + ... + U_r <= x) by the alternating binomial formula, in mpmath."""
    x = mpmath.mpf(x)
    if x <= 0:
        return mpmath.mpf(0)
    if x >= r:
        return mpmath.mpf(1)
    return sum((-1) ** k * mpmath.binomial(r, k) * (x - k) ** r
               for k in range(int(mpmath.floor(x)) + 1)) / mpmath.factorial(r)


def cup_value(t, Delta, r):
    """Box-convolution cup on the circle, evaluated from the Irwin-Hall law."""
    t = mpmath.mpf(t)
    u = abs(t - mpmath.nint(t))
    if u >= Delta:
        return mpmath.mpf(0)
    return irwin_hall_cdf(r * (1 - u / Delta), r)


def cup_coeff_quad(k, Delta, r, dps=30):
    """g(k) = 2 int_0^Delta chi(t) cos(2 pi k t) dt, split at the spline knots."""
    with mpmath.workdps(dps):
        D = mpmath.mpf(Delta)
        knots = sorted({D * (1 - mpmath.mpf(j) / r) for j in range(r + 1)})
        f = lambda t: cup_value(t, D, r) * mpmath.cos(2 * mpmath.pi * k * t)  # noqa: E731
        return 2 * mpmath.quad(f, knots)
