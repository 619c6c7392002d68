# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, floor, fma, nearbyint, M_PI

cnp.import_array()

# Rotation steps between exact re-seeds of e(k t); bounds drift to ~RESYNC * eps.
DEF RESYNC = 128


def factor_segment(long long lo, long long hi, const cnp.int64_t[::1] base_primes):
    cdef Py_ssize_t n = hi - lo
    spf_arr = np.zeros(n, dtype=np.int64)
    rem_arr = np.arange(lo, hi, dtype=np.int64)
    bigomega_arr = np.zeros(n, dtype=np.int8)
    omega_arr = np.zeros(n, dtype=np.int8)
    mu_arr = np.ones(n, dtype=np.int8)
    phi_arr = np.ones(n, dtype=np.int64)
    cdef cnp.int64_t[::1] spf = spf_arr
    cdef cnp.int64_t[::1] rem = rem_arr
    cdef cnp.int8_t[::1] bigomega = bigomega_arr
    cdef cnp.int8_t[::1] omega = omega_arr
    cdef cnp.int8_t[::1] mu = mu_arr
    cdef cnp.int64_t[::1] phi = phi_arr
    cdef Py_ssize_t i, j, np_ = base_primes.shape[0]
    cdef long long p, start, m
    for j in range(np_):
        p = base_primes[j]
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        i = start - lo
        while i < n:
            if spf[i] == 0:
                spf[i] = p
            omega[i] += 1
            bigomega[i] += 1
            mu[i] = -mu[i]
            phi[i] *= p - 1
            m = rem[i] // p
            while m % p == 0:
                m //= p
                bigomega[i] += 1
                phi[i] *= p
                mu[i] = 0
            rem[i] = m
            i += p
    for i in range(n):
        if rem[i] > 1:
            if spf[i] == 0:
                spf[i] = rem[i]
            omega[i] += 1
            bigomega[i] += 1
            mu[i] = -mu[i]
            phi[i] *= rem[i] - 1
        elif spf[i] == 0:
            spf[i] = 1
    return spf_arr, bigomega_arr, omega_arr, mu_arr, phi_arr


def cos_series(const double[::1] coeffs, const double[::1] phases):
    """out[j] = sum_{k>=1} coeffs[k-1] * cos(2 pi k phases[j])."""
    cdef Py_ssize_t K = coeffs.shape[0], P = phases.shape[0], j, k
    out_arr = np.zeros(P, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double t, c1, s1, cr, ci, tmp, acc, ang
    for j in range(P):
        t = phases[j] - floor(phases[j])
        ang = 2.0 * M_PI * t
        c1 = cos(ang)
        s1 = sin(ang)
        cr = c1
        ci = s1
        acc = 0.0
        for k in range(K):
            acc += coeffs[k] * cr
            if (k + 1) % RESYNC == 0:
                tmp = (k + 2) * t
                tmp = 2.0 * M_PI * (tmp - floor(tmp))
                cr = cos(tmp)
                ci = sin(tmp)
            else:
                tmp = cr * c1 - ci * s1
                ci = cr * s1 + ci * c1
                cr = tmp
        out[j] = acc
    return out_arr


def phase_series(const double complex[::1] c_pos, const double complex[::1] c_neg,
                 const double[::1] phases):
    """out[j] = sum_{k>=1} (c_pos[k-1] e(k t_j) + c_neg[k-1] e(-k t_j))."""
    cdef Py_ssize_t K = c_pos.shape[0], P = phases.shape[0], j, k
    out_arr = np.zeros(P, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double t, c1, s1, cr, ci, tmp, ang
    cdef double accr, acci
    cdef double complex a, b
    for j in range(P):
        t = phases[j] - floor(phases[j])
        ang = 2.0 * M_PI * t
        c1 = cos(ang)
        s1 = sin(ang)
        cr = c1
        ci = s1
        accr = 0.0
        acci = 0.0
        for k in range(K):
            a = c_pos[k]
            b = c_neg[k]
            # a e(kt) + b e(-kt) with e(kt) = cr + i ci
            accr += (a.real + b.real) * cr - (a.imag - b.imag) * ci
            acci += (a.imag + b.imag) * cr + (a.real - b.real) * ci
            if (k + 1) % RESYNC == 0:
                tmp = (k + 2) * t
                tmp = 2.0 * M_PI * (tmp - floor(tmp))
                cr = cos(tmp)
                ci = sin(tmp)
            else:
                tmp = cr * c1 - ci * s1
                ci = cr * s1 + ci * c1
                cr = tmp
        out[j] = accr + 1j * acci
    return out_arr


# ---- double-double cosine series -------------------------------------------

cdef inline void _fast_two_sum(double a, double b, double* s, double* e) noexcept nogil:
    cdef double ss = a + b
    e[0] = b - (ss - a)
    s[0] = ss


cdef inline void _two_sum(double a, double b, double* s, double* e) noexcept nogil:
    cdef double ss = a + b
    cdef double bb = ss - a
    e[0] = (a - (ss - bb)) + (b - bb)
    s[0] = ss


cdef inline void _dd_add(double ah, double al, double bh, double bl,
                         double* ch, double* cl) noexcept nogil:
    cdef double s, e, t, f
    _two_sum(ah, bh, &s, &e)
    _two_sum(al, bl, &t, &f)
    e += t
    _fast_two_sum(s, e, &s, &e)
    e += f
    _fast_two_sum(s, e, ch, cl)


cdef inline void _dd_mul(double ah, double al, double bh, double bl,
                         double* ch, double* cl) noexcept nogil:
    cdef double p = ah * bh
    cdef double e = fma(ah, bh, -p)
    e += ah * bl + al * bh
    _fast_two_sum(p, e, ch, cl)


cdef void _pairwise(double* hi, double* lo, Py_ssize_t n, double* rh, double* rl) noexcept nogil:
    # in-place pairwise reduction; error grows with ceil(log2 n), not n
    cdef Py_ssize_t i, m
    while n > 1:
        m = n // 2
        for i in range(m):
            _dd_add(hi[2 * i], lo[2 * i], hi[2 * i + 1], lo[2 * i + 1], &hi[i], &lo[i])
        if n % 2:
            hi[m] = hi[n - 1]
            lo[m] = lo[n - 1]
            m += 1
        n = m
    if n == 1:
        rh[0] = hi[0]
        rl[0] = lo[0]
    else:
        rh[0] = 0.0
        rl[0] = 0.0


def dd_cos_series(const double[::1] g_hi, const double[::1] g_lo,
                  const double[::1] t_hi, const double[::1] t_lo,
                  const double[::1] c_hi, const double[::1] c_lo,
                  const double[::1] s_hi, const double[::1] s_lo,
                  const double[::1] consts, const cnp.int64_t[::1] marks):
    """Partial sums sum_{k<=marks[i]} g_k cos(2 pi k t_j) in double-double.

    ``consts`` = (2pi hi, 2pi lo, 1/6 hi, 1/6 lo); table length must be a power of two.
    Returns (hi, lo), each of shape (len(marks), len(t)).
    """
    cdef Py_ssize_t K = g_hi.shape[0], P = t_hi.shape[0], nm = marks.shape[0]
    cdef Py_ssize_t N = c_hi.shape[0], mask = N - 1
    cdef Py_ssize_t j, k, i, a, b, idx
    out_h = np.zeros((nm, P), dtype=np.float64)
    out_l = np.zeros((nm, P), dtype=np.float64)
    cdef double[:, ::1] oh = out_h
    cdef double[:, ::1] ol = out_l
    buf_h = np.empty(K, dtype=np.float64)
    buf_l = np.empty(K, dtype=np.float64)
    cdef double[::1] bh = buf_h
    cdef double[::1] bl = buf_l
    cdef double th, tl, kk, ph, pe, vh, vl, rh, rl, wh, wl, xh, xl, x2h, x2l
    cdef double x4, x6, ch, cl, sh, sl, qh, ql, uh, ul, acch, accl, dn = <double>N
    cdef double tp_h = consts[0], tp_l = consts[1], i6h = consts[2], i6l = consts[3]
    cdef long long m
    for j in range(P):
        th = t_hi[j]
        tl = t_lo[j]
        for k in range(K):
            kk = <double>(k + 1)
            # exact reduction of k*t to [-1/2, 1/2] (nearest integer keeps it exact)
            ph = kk * th
            pe = fma(kk, th, -ph)
            ph -= nearbyint(ph)
            _two_sum(ph, pe + kk * tl, &vh, &vl)
            m = <long long>floor(vh * dn)
            _two_sum(vh, -(<double>m) / dn, &rh, &rl)
            _two_sum(rh, rl + vl, &wh, &wl)
            idx = m & mask
            # x = 2 pi w, |x| <= 2 pi / N
            _dd_mul(wh, wl, tp_h, tp_l, &xh, &xl)
            _dd_mul(xh, xl, xh, xl, &x2h, &x2l)
            x4 = x2h * x2h
            x6 = x4 * x2h
            # cos x = 1 - x^2/2 + x^4/24 - x^6/720
            _dd_add(1.0, 0.0, -0.5 * x2h, -0.5 * x2l, &ch, &cl)
            _dd_add(ch, cl, x4 / 24.0 - x6 / 720.0, 0.0, &ch, &cl)
            # sin x = x (1 - x^2/6 + x^4/120 - x^6/5040)
            _dd_mul(x2h, x2l, i6h, i6l, &qh, &ql)
            _dd_add(1.0, 0.0, -qh, -ql, &sh, &sl)
            _dd_add(sh, sl, x4 / 120.0 - x6 / 5040.0, 0.0, &sh, &sl)
            _dd_mul(xh, xl, sh, sl, &sh, &sl)
            # cos(2 pi (m/N + w)) = C_m cos x - S_m sin x
            _dd_mul(c_hi[idx], c_lo[idx], ch, cl, &uh, &ul)
            _dd_mul(s_hi[idx], s_lo[idx], sh, sl, &qh, &ql)
            _dd_add(uh, ul, -qh, -ql, &uh, &ul)
            _dd_mul(g_hi[k], g_lo[k], uh, ul, &bh[k], &bl[k])
        acch = 0.0
        accl = 0.0
        a = 0
        for i in range(nm):
            b = marks[i]
            _pairwise(&bh[a], &bl[a], b - a, &uh, &ul)
            _dd_add(acch, accl, uh, ul, &acch, &accl)
            oh[i, j] = acch
            ol[i, j] = accl
            a = b
    return out_h, out_l
