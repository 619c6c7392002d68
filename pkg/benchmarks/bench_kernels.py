"""Compare the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--size S]
Prints one line per kernel: best time for each backend, speedup, and the
max abs difference between the two outputs.
"""

import argparse
import time

import numpy as np

from primefrac import _kernels_py as pure
from primefrac import hp
from primefrac.ntcore.factor import primes_upto

try:
    from primefrac import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, dtype=np.complex128) - np.asarray(b, dtype=np.complex128))))


def cases(size, rng):
    lo = 10 ** 7
    base = primes_upto(int((lo + size) ** 0.5) + 1).astype(np.int64)
    coeffs = rng.standard_normal(256)
    phases = rng.random(size // 10)
    cp = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    cn = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    g_hi = rng.standard_normal(256) * 1e-3
    g_lo = np.zeros_like(g_hi)
    t_hi = rng.random(size // 100)
    t_lo = np.zeros_like(t_hi)
    marks = np.array([64, 256])
    return {
        "factor_segment": lambda m: m.factor_segment(lo, lo + size, base),
        "cos_series": lambda m: m.cos_series(coeffs, phases),
        "phase_series": lambda m: m.phase_series(cp, cn, phases),
        "dd_cos_series": lambda m: hp.dd_cos_partial_sums(g_hi, g_lo, t_hi, t_lo, marks, impl=m),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=10 ** 6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'python s':>12}{'cython s':>12}{'speedup':>10}{'max diff':>12}")
    for name, run in cases(args.size, rng).items():
        tp, out_p = best_of(lambda: run(pure), args.repeat)
        if compiled is None:
            print(f"{name:<16}{tp:>12.4f}{'n/a':>12}{'n/a':>10}{'n/a':>12}")
            continue
        tc, out_c = best_of(lambda: run(compiled), args.repeat)
        print(f"{name:<16}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{max_diff(out_p, out_c):>12.2e}")


if __name__ == "__main__":
    main()
