"""Bilinear decomposition of sum_{X/2<n<=X} Lambda(n) f(n) via Heath-Brown's identity (k = 2).

With Z = ceil(sqrt(X)) and mu_Z = mu * 1_{[1, Z]}, every n <= Z^2 satisfies

    Lambda(n) = 2 (mu_Z * log)(n) - (mu_Z * mu_Z * log * 1)(n).

The first term has variables (m, l) with coefficient 2 mu(m) log l, the second
has (m, n1, n2) with m = m1 m2 carrying -(mu_Z * mu_Z)(m) and log n1. Every
variable is cut into dyadic ranges (M, 2M]; boxes whose product range misses
(X/2, X] are pruned. Each surviving box is one piece, evaluated exactly against
a tabulated f, so the pieces sum to the direct von Mangoldt sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from ..errors import DomainError, ResourceError
from ..ntcore.factor import build_factor_table
from ..ntcore.params import Params

VERIFY_CAP = 10 ** 6
BUILD_CAP = 10 ** 6


@dataclass(frozen=True)
class DecompParams:
    u: float
    v: float
    w: float
    X: int

    @classmethod
    def from_params(cls, params: Params) -> "DecompParams":
        X = params.X
        u = 2.0 ** -7 * X ** (params.delta / 2)
        v = 2.0 ** 7 * X ** (1 / 3)
        w = X ** (0.5 - params.delta / 4)
        # nearest value with w - 1/2 integral
        w = math.floor(w) + 0.5
        return cls(u, v, w, X)

    def violations(self) -> list[str]:
        u, v, w, X = self.u, self.v, self.w, self.X
        out = []
        if not 3 <= u:
            out.append("u >= 3")
        if not u < v < w < X:
            out.append("u < v < w < X")
        if (w - 0.5) != int(w - 0.5):
            out.append("w - 1/2 integral")
        if not w >= 4 * u * u:
            out.append("w >= 4u^2")
        if not X >= 64 * w * w * u:
            out.append("X >= 64 w^2 u")
        if not v ** 3 >= 32 * X:
            out.append("v^3 >= 32X")
        return out

    def validate(self):
        bad = self.violations()
        if bad:
            raise DomainError("decomposition parameters violate: " + ", ".join(bad))


@dataclass(frozen=True)
class Var:
    name: str
    lo: int  # range is (lo, hi]
    hi: int
    smooth: bool


@dataclass(eq=False)
class BilinearPiece:
    """One dyadic box of the identity.

    ``M, M1`` and ``L, L1`` describe the bilinear split used for the label:
    the m-side collects the remaining variables, the l-side is the smooth
    variable (Type I) or the middle-range product (Type II).
    """

    kind: str
    term: int
    variables: tuple[Var, ...]
    M: int
    M1: int
    L: int
    L1: int
    flags: dict = field(default_factory=dict)
    _builder: object = field(default=None, repr=False)
    _cache: tuple | None = field(default=None, repr=False)

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Sparse (n, coefficient) arrays for n in (X/2, X]."""
        if self._cache is None:
            self._cache = self._builder()
        return self._cache

    def evaluate(self, f_table: np.ndarray, offset: int) -> complex:
        """sum_n c(n) f(n), with f(n) = f_table[n - offset]."""
        idx, coef = self.coefficients()
        if idx.size == 0:
            return 0j
        return complex(np.dot(coef, f_table[idx - offset]))


@dataclass
class Decomposition:
    X: int
    dp: DecompParams
    pieces: list[BilinearPiece]
    total: complex | None
    direct: complex | None
    verification_skipped: bool

    @property
    def rel_error(self) -> float | None:
        if self.total is None or self.direct is None:
            return None
        return abs(self.total - self.direct) / max(abs(self.direct), 1e-300)

    def counts(self) -> dict:
        out = {"TypeI": 0, "TypeII": 0, "boundary": 0}
        for p in self.pieces:
            out[p.kind] += 1
        return out


# ---- arithmetic helpers ------------------------------------------------------

def _mu_upto(n, table=None):
    t = table or build_factor_table(1, n + 1)
    return t.mu[:n].astype(np.int64)  # index i -> mu(i + 1)


def _mu_conv_mu(Z, mu):
    """(mu_Z * mu_Z)(m) for m <= Z^2, index m - 1."""
    N = Z * Z
    out = np.zeros(N, dtype=np.int64)
    m1 = np.flatnonzero(mu[:Z]) + 1
    for a in m1:
        b = m1
        out[a * b - 1] += mu[a - 1] * mu[b - 1]
    return out


def _dyadic(hi):
    """Dyadic ranges (2^(j-1), 2^j] covering [1, hi] (the first one is {1})."""
    out = []
    j = 0
    while (1 << j) // 2 < hi:
        out.append(((1 << j) // 2, min(1 << j, hi)))
        j += 1
    return out


def _pairs(a_lo, a_hi, b_lo, b_hi, lo, hi):
    """All (a, b) with a in (a_lo, a_hi], b in (b_lo, b_hi], lo < a b <= hi."""
    a = np.arange(a_lo + 1, a_hi + 1, dtype=np.int64)
    blo = np.maximum(b_lo, lo // a)  # b > lo/a  <=>  b > floor(lo/a)
    bhi = np.minimum(b_hi, hi // a)
    cnt = np.maximum(bhi - blo, 0)
    keep = cnt > 0
    a, blo, cnt = a[keep], blo[keep], cnt[keep]
    if a.size == 0:
        e = np.zeros(0, dtype=np.int64)
        return e, e
    aa = np.repeat(a, cnt)
    start = np.repeat(np.cumsum(cnt) - cnt, cnt)
    bb = np.repeat(blo, cnt) + 1 + (np.arange(aa.size) - start)
    return aa, bb


def _merge(idx, coef):
    if idx.size == 0:
        return idx, coef
    u, inv = np.unique(idx, return_inverse=True)
    return u, np.bincount(inv, weights=coef, minlength=u.size)


# ---- classification --------------------------------------------------------------

def _classify(vars_, dp: DecompParams):
    """Label a box; returns (kind, M, M1, L, L1)."""
    lo = lambda vs: math.prod(max(v.lo, 1) if v.lo else 1 for v in vs)  # noqa: E731
    hi = lambda vs: math.prod(v.hi for v in vs)  # noqa: E731
    for v in vars_:
        if v.smooth and v.lo >= dp.w:
            rest = [x for x in vars_ if x is not v]
            return "TypeI", lo(rest), hi(rest), v.lo, v.hi
    for r in range(1, len(vars_)):
        for sub in combinations(vars_, r):
            L, L1 = lo(sub), hi(sub)
            if dp.u <= L and L1 <= dp.v:
                rest = [x for x in vars_ if x not in sub]
                return "TypeII", lo(rest), hi(rest), L, L1
    # unlabeled: report the last variable as the l-side
    return "boundary", lo(vars_[:-1]), hi(vars_[:-1]), vars_[-1].lo, vars_[-1].hi


def _flags(M, M1, L, L1, X):
    return {
        "M1<=2M": M1 <= 2 * max(M, 1) or M == 0,
        "L1<=2L": L1 <= 2 * max(L, 1) or L == 0,
        "ML in [X/4,4X]": X / 4 <= max(M, 1) * max(L, 1) * 2 and max(M, 1) * max(L, 1) <= 4 * X,
    }


# ---- main entry ---------------------------------------------------------------------

def decompose_lambda_sum(f, dp: DecompParams, verify: bool = True,
                         strict: bool = False) -> Decomposition:
    """Split sum_{X/2<n<=X} Lambda(n) f(n) into labelled bilinear pieces.

    ``f`` is a vectorized callable on int64 arrays, an array of values on
    (X/2, X], or None (pieces only). With ``strict`` the parameter invariants
    are enforced; otherwise violations are recorded in each piece's flags.
    """
    if strict:
        dp.validate()
    X = int(dp.X)
    if X < 4:
        raise DomainError("X must be >= 4")
    if X > BUILD_CAP:
        raise ResourceError(f"exact decomposition is limited to X <= {BUILD_CAP}")
    lo_w = X // 2  # window is (lo_w, X]
    Z = math.isqrt(X - 1) + 1
    tab = build_factor_table(1, Z * Z + 1)
    mu = tab.mu.astype(np.int64)
    A = -_mu_conv_mu(Z, mu)
    log_tab = np.log(np.arange(1, X + 1, dtype=np.float64))
    violations = dp.violations()
    pieces = []

    def term1(mb, lb):
        def build():
            ms = np.arange(mb[0] + 1, mb[1] + 1)
            ms = ms[mu[ms - 1] != 0]
            idx, coef = [], []
            for m in ms:
                l0 = max(lb[0], lo_w // m)
                l1 = min(lb[1], X // m)
                if l1 > l0:
                    ls = np.arange(l0 + 1, l1 + 1)
                    idx.append(m * ls)
                    coef.append(2.0 * mu[m - 1] * log_tab[ls - 1])
            if not idx:
                return np.zeros(0, np.int64), np.zeros(0)
            return _merge(np.concatenate(idx), np.concatenate(coef))
        return build

    def term2(mb, b1, b2):
        def build():
            ms = np.arange(mb[0] + 1, mb[1] + 1)
            ms = ms[A[ms - 1] != 0]
            idx, coef = [], []
            for m in ms:
                n1, n2 = _pairs(b1[0], b1[1], b2[0], b2[1], lo_w // m, X // m)
                # lo_w // m < n1 n2 is slightly loose; the exact window is applied below
                n = m * n1 * n2
                keep = n > lo_w
                if keep.any():
                    idx.append(n[keep])
                    coef.append(float(A[m - 1]) * log_tab[n1[keep] - 1])
            if not idx:
                return np.zeros(0, np.int64), np.zeros(0)
            return _merge(np.concatenate(idx), np.concatenate(coef))
        return build

    def overlaps(boxes):
        plo = math.prod(b[0] for b in boxes)
        phi = math.prod(b[1] for b in boxes)
        return phi > lo_w and plo < X

    def add(term, vars_, builder):
        kind, M, M1, L, L1 = _classify(vars_, dp)
        flags = _flags(M, M1, L, L1, X)
        flags["params"] = not violations
        pieces.append(BilinearPiece(kind, term, tuple(vars_), M, M1, L, L1, flags, builder))

    for mb, lb in product(_dyadic(Z), _dyadic(X)):
        if overlaps([mb, lb]):
            add(1, [Var("m", *mb, False), Var("l", *lb, True)], term1(mb, lb))
    for mb, b1, b2 in product(_dyadic(min(Z * Z, X)), _dyadic(X), _dyadic(X)):
        if overlaps([mb, b1, b2]):
            add(2, [Var("m", *mb, False), Var("n1", *b1, True), Var("n2", *b2, True)],
                term2(mb, b1, b2))

    total = direct = None
    skipped = X > VERIFY_CAP
    if f is not None:
        table = _tabulate(f, lo_w + 1, X)
        total = _sum_pieces(pieces, table, lo_w + 1)
        if verify and not skipped:
            direct = direct_lambda_sum(table, X)
    return Decomposition(X, dp, pieces, total, direct, skipped)


def _tabulate(f, lo, hi):
    if callable(f):
        return np.asarray(f(np.arange(lo, hi + 1, dtype=np.int64)), dtype=np.complex128)
    arr = np.asarray(f, dtype=np.complex128)
    if arr.shape != (hi - lo + 1,):
        raise DomainError(f"f table must have {hi - lo + 1} entries")
    return arr


def _sum_pieces(pieces, table, offset) -> complex:
    vals = [p.evaluate(table, offset) for p in pieces]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def evaluate_pieces(dec: Decomposition, f) -> complex:
    """Re-evaluate an existing decomposition against another f."""
    table = _tabulate(f, dec.X // 2 + 1, dec.X)
    return _sum_pieces(dec.pieces, table, dec.X // 2 + 1)


def direct_lambda_sum(f, X) -> complex:
    """sum_{X/2<n<=X} Lambda(n) f(n) straight from a factor table."""
    lo = X // 2 + 1
    table = _tabulate(f, lo, X)
    lam = build_factor_table(lo, X + 1).mangoldt
    return complex(math.fsum((lam * table.real)), math.fsum(lam * table.imag))
