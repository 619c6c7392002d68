"""Prime search: p in (lo, hi] with ||alpha p^2 + beta|| < p^-theta and Omega(p+2) <= 4."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError, PrecisionError, ResourceError
from .ntcore.factor import SEGMENT_CAP, build_factor_table, coprime_mask, factorize, format_factorization
from .ntcore.fixedreal import FixedReal, frac_norm
from .ntcore.params import DEMO_SIEVE, exact

FILTERS = ("plain", "sieved")
OMEGA_MAX = 4
SEARCH_CAP = 10 ** 9
CSV_COLUMNS = ("p", "norm", "threshold", "omega", "factorization")


@dataclass(frozen=True)
class SearchRecord:
    p: int
    norm: float
    threshold: float
    omega_shift: int
    coprime: bool
    accepted: bool
    factorization: str = ""


@dataclass
class SearchResult:
    lo: int
    hi: int
    theta: float
    filter: str
    z: float
    alpha: str
    beta: str
    bits: int
    records: list
    dropped: list  # (p, diagnostic)

    @property
    def accepted(self) -> list:
        return [r for r in self.records if r.accepted]

    @property
    def min_norm(self) -> float | None:
        return min((r.norm for r in self.records), default=None)

    def summary(self) -> dict:
        return {"window": [self.lo, self.hi], "theta": self.theta, "filter": self.filter,
                "z": self.z, "alpha": self.alpha, "beta": self.beta, "bits": self.bits,
                "primes": len(self.records) + len(self.dropped), "accepted": len(self.accepted),
                "dropped": len(self.dropped), "min_norm": self.min_norm}

    def to_json(self) -> dict:
        return {"schema": "1", "summary": self.summary(),
                "accepted": [asdict(r) for r in self.accepted],
                "dropped": [{"p": p, "reason": why} for p, why in self.dropped]}

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in self.accepted:
                w.writerow([r.p, repr(r.norm), repr(r.threshold), r.omega_shift, r.factorization])

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def threshold_interval(p: int, theta: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bracket [lo, hi] around p^-theta with width about 2^-(bits-8) relative."""
    if theta.denominator == 1:  # p^-theta is rational only for integral theta
        q = Fraction(1, p ** theta.numerator)
        return q, q
    with mpmath.workprec(bits + 16):
        v = mpmath.exp(-mpmath.mpf(theta.numerator) / theta.denominator * mpmath.log(p))
        m, e = mpmath.frexp(v)
        q = Fraction(int(mpmath.floor(m * 2 ** bits)), 1 << bits) * (Fraction(2) ** int(e))
    slack = q * Fraction(1, 1 << (bits - 8))
    return q - slack, q + slack


def certified_below(fn, p: int, theta: Fraction, bits: int) -> bool:
    """norm < p^-theta, certified; raises PrecisionError when undecidable at this precision."""
    lo, hi = threshold_interval(p, theta, bits)
    nf = fn.norm_fraction
    if nf + fn.error < lo:
        return True
    if nf - fn.error >= hi:
        return False
    if lo == hi:  # exact threshold: ties reject
        return fn.below(lo)
    raise PrecisionError(f"p={p}: norm {float(nf):.6e} within precision of p^-theta")


def _classify(alpha, beta, p, theta, bits):
    fn = frac_norm(alpha, beta, p)
    return fn, certified_below(fn, p, theta, bits)


def search_solutions(alpha, beta, theta, window, filter: str = "plain", z: float | None = None,
                     bits: int = 256, chunk: int = 1 << 20) -> SearchResult:
    """Classify every prime of (lo, hi]; accepted records are rechecked at twice the precision.

    ``z`` is the sifting bound for filter="sieved"; it defaults to hi^eta with the
    desk-scale eta. Chunks are independent, so any chunk size gives the same records.
    """
    if filter not in FILTERS:
        raise DomainError(f"filter must be one of {FILTERS}")
    lo, hi = (int(v) for v in window)
    if lo < 0 or hi < lo:
        raise DomainError("window must satisfy 0 <= lo <= hi")
    if hi > SEARCH_CAP:
        raise ResourceError(f"search window is capped at {SEARCH_CAP}")
    th = exact(theta)
    if th < 0:
        raise DomainError("theta must be >= 0")
    a = FixedReal.parse(alpha, bits)
    b = FixedReal.parse(beta, bits)
    a2 = a.at_precision(2 * bits) if (a.tag or a.is_rational) else None
    b2 = b.at_precision(2 * bits) if (b.tag or b.is_rational) else None
    if z is None:
        z = max(hi, 2) ** DEMO_SIEVE["eta"]
    records, dropped = [], []
    chunk = max(1, min(int(chunk), SEGMENT_CAP - 4))
    start = lo
    while start < hi:
        stop = min(hi, start + chunk)
        tab = build_factor_table(start + 1, stop + 3)
        nums = np.arange(start + 1, stop + 1)
        ps = nums[tab.is_prime[:nums.size]]
        cop = coprime_mask(ps + 2, z)
        for p, c in zip(ps.tolist(), cop.tolist()):
            omega = tab.big_omega_of(p + 2)
            try:
                fn, below = _classify(a, b, p, th, bits)
            except PrecisionError as exc:
                dropped.append((p, str(exc)))
                continue
            ok = below and omega <= OMEGA_MAX and (c or filter == "plain")
            fac = ""
            if ok:
                if a2 is None or b2 is None:
                    dropped.append((p, "no symbolic source for the doubled-precision recheck"))
                    continue
                try:
                    fn2, below2 = _classify(a2, b2, p, th, 2 * bits)
                except PrecisionError as exc:
                    dropped.append((p, f"recheck: {exc}"))
                    continue
                if not below2 or abs(fn2.norm_fraction - fn.norm_fraction) > fn.error + fn2.error:
                    dropped.append((p, "doubled-precision recheck disagrees"))
                    continue
                fac = format_factorization(factorize(p + 2))
            thr = 1.0 if th == 0 else float(mpmath.power(p, -mpmath.mpf(th.numerator) / th.denominator))
            records.append(SearchRecord(p, fn.norm, thr, omega, bool(c), ok, fac))
        start = stop
    return SearchResult(lo, hi, float(theta), filter, float(z), a.spec, b.spec, bits, records, dropped)
