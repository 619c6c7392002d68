"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and return types; used when the extension is not built or
when ``PRIMEFRAC_PURE=1`` is set.
"""

import numpy as np

# Phases per block when materialising k*t outer products.
_BLOCK = 256


def factor_segment(lo, hi, base_primes):
    n = hi - lo
    spf = np.zeros(n, dtype=np.int64)
    rem = np.arange(lo, hi, dtype=np.int64)
    bigomega = np.zeros(n, dtype=np.int8)
    omega = np.zeros(n, dtype=np.int8)
    mu = np.ones(n, dtype=np.int8)
    phi = np.ones(n, dtype=np.int64)
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = -(-lo // p) * p
        idx = np.arange(start - lo, n, p)
        if idx.size == 0:
            continue
        fresh = spf[idx] == 0
        spf[idx[fresh]] = p
        omega[idx] += 1
        bigomega[idx] += 1
        mu[idx] = -mu[idx]
        phi[idx] *= p - 1
        rem[idx] //= p
        hit = idx[rem[idx] % p == 0]
        if hit.size:
            mu[hit] = 0
        while hit.size:
            rem[hit] //= p
            bigomega[hit] += 1
            phi[hit] *= p
            hit = hit[rem[hit] % p == 0]
    big = rem > 1
    spf[big & (spf == 0)] = rem[big & (spf == 0)]
    omega[big] += 1
    bigomega[big] += 1
    mu[big] = -mu[big]
    phi[big] *= rem[big] - 1
    spf[spf == 0] = 1
    return spf, bigomega, omega, mu, phi


def cos_series(coeffs, phases):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    k = np.arange(1, coeffs.size + 1, dtype=np.float64)
    out = np.zeros(phases.size)
    for s in range(0, phases.size, _BLOCK):
        t = phases[s:s + _BLOCK] % 1.0
        kt = np.outer(t, k)
        kt -= np.floor(kt)
        out[s:s + _BLOCK] = np.cos(2 * np.pi * kt) @ coeffs
    return out


def phase_series(c_pos, c_neg, phases):
    c_pos = np.ascontiguousarray(c_pos, dtype=np.complex128)
    c_neg = np.ascontiguousarray(c_neg, dtype=np.complex128)
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    k = np.arange(1, c_pos.size + 1, dtype=np.float64)
    out = np.zeros(phases.size, dtype=np.complex128)
    for s in range(0, phases.size, _BLOCK):
        t = phases[s:s + _BLOCK] % 1.0
        kt = np.outer(t, k)
        kt -= np.floor(kt)
        ang = 2 * np.pi * kt
        c, si = np.cos(ang), np.sin(ang)
        out[s:s + _BLOCK] = (c + 1j * si) @ c_pos + (c - 1j * si) @ c_neg
    return out


# ---- double-double cosine series -------------------------------------------

_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    s, e = _fast_two_sum(s, e + t)
    return _fast_two_sum(s, e + f)


def dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    return _fast_two_sum(p, e + (ah * bl + al * bh))


def _pairwise(hi, lo):
    # reduce along the last axis by halving; same error profile as the C loop
    while hi.shape[-1] > 1:
        n = hi.shape[-1]
        m = n // 2
        h, l = dd_add(hi[..., 0:2 * m:2], lo[..., 0:2 * m:2], hi[..., 1:2 * m:2], lo[..., 1:2 * m:2])
        if n % 2:
            h = np.concatenate([h, hi[..., -1:]], axis=-1)
            l = np.concatenate([l, lo[..., -1:]], axis=-1)
        hi, lo = h, l
    if hi.shape[-1] == 0:
        z = np.zeros(hi.shape[:-1])
        return z, z.copy()
    return hi[..., 0], lo[..., 0]


def dd_cos_series(g_hi, g_lo, t_hi, t_lo, c_hi, c_lo, s_hi, s_lo, consts, marks):
    K, P, N = len(g_hi), len(t_hi), len(c_hi)
    tp_h, tp_l, i6h, i6l = (float(c) for c in consts)
    marks = [int(m) for m in marks]
    out_h = np.zeros((len(marks), P))
    out_l = np.zeros((len(marks), P))
    kk = np.arange(1, K + 1, dtype=np.float64)
    rows = max(1, (1 << 20) // max(K, 1))
    for s0 in range(0, P, rows):
        th = np.asarray(t_hi[s0:s0 + rows])[:, None]
        tl = np.asarray(t_lo[s0:s0 + rows])[:, None]
        ph, pe = _two_prod(kk[None, :], th)
        ph = ph - np.rint(ph)
        vh, vl = _two_sum(ph, pe + kk * tl)
        m = np.floor(vh * N)
        rh, rl = _two_sum(vh, -m / N)
        wh, wl = _two_sum(rh, rl + vl)
        idx = m.astype(np.int64) & (N - 1)
        xh, xl = dd_mul(wh, wl, tp_h, tp_l)
        x2h, x2l = dd_mul(xh, xl, xh, xl)
        x4 = x2h * x2h
        x6 = x4 * x2h
        ch, cl = dd_add(1.0, 0.0, -0.5 * x2h, -0.5 * x2l)
        ch, cl = dd_add(ch, cl, x4 / 24.0 - x6 / 720.0, 0.0)
        qh, ql = dd_mul(x2h, x2l, i6h, i6l)
        sh, sl = dd_add(1.0, 0.0, -qh, -ql)
        sh, sl = dd_add(sh, sl, x4 / 120.0 - x6 / 5040.0, 0.0)
        sh, sl = dd_mul(xh, xl, sh, sl)
        uh, ul = dd_mul(c_hi[idx], c_lo[idx], ch, cl)
        qh, ql = dd_mul(s_hi[idx], s_lo[idx], sh, sl)
        uh, ul = dd_add(uh, ul, -qh, -ql)
        bh, bl = dd_mul(np.asarray(g_hi)[None, :], np.asarray(g_lo)[None, :], uh, ul)
        acch = np.zeros(th.shape[0])
        accl = np.zeros(th.shape[0])
        a = 0
        for i, b in enumerate(marks):
            rh_, rl_ = _pairwise(bh[:, a:b], bl[:, a:b])
            acch, accl = dd_add(acch, accl, rh_, rl_)
            out_h[i, s0:s0 + rows] = acch
            out_l[i, s0:s0 + rows] = accl
            a = b
    return out_h, out_l
