"""Ratio monitors for the asymptotic statements, written to a CSV ledger.

A monitor records an observed quantity (lhs) next to the shape of the bound it
is expected to satisfy (rhs_shape). Implied constants are unknown, so nothing
here asserts; the ratios are archived for inspection.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from ..cup import cup_build
from ..ntcore.diophantine import convergents, xj_from_convergent
from ..ntcore.factor import build_factor_table
from ..ntcore.fixedreal import FixedReal
from ..ntcore.params import Params
from ..rosser import rosser_build
from .lemmas import min_sum_diagnostic
from .sums import S_of_X, TypeSumSpec, c_from_cup, type_sums_brute

COLUMNS = ("monitor", "instance", "params", "lhs", "rhs_shape", "ratio")


@dataclass(frozen=True)
class MonitorRow:
    monitor: str
    instance: str
    params: str  # JSON
    lhs: float
    rhs_shape: float
    ratio: float

    @classmethod
    def make(cls, monitor, instance, params: dict, lhs, rhs_shape):
        lhs, rhs_shape = float(lhs), float(rhs_shape)
        ratio = lhs / rhs_shape if rhs_shape else math.inf
        return cls(monitor, instance, json.dumps(params, sort_keys=True), lhs, rhs_shape, ratio)

    @property
    def finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.lhs, self.rhs_shape, self.ratio))


class MonitorLedger:
    def __init__(self):
        self.rows: list[MonitorRow] = []

    def add(self, row: MonitorRow):
        self.rows.append(row)

    def extend(self, rows):
        self.rows.extend(rows)

    @property
    def all_finite(self) -> bool:
        return all(r.finite for r in self.rows)

    def max_ratio(self, monitor) -> float:
        vals = [r.ratio for r in self.rows if r.monitor == monitor]
        return max(vals) if vals else math.nan

    def write_csv(self, path, append=False):
        """Write (or append to) a CSV ledger with the fixed column set."""
        new = not (append and os.path.exists(path))
        with open(path, "a" if append else "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(COLUMNS)
            for r in self.rows:
                d = asdict(r)
                w.writerow([d["monitor"], d["instance"], d["params"],
                            repr(d["lhs"]), repr(d["rhs_shape"]), repr(d["ratio"])])


def read_csv(path) -> list[MonitorRow]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [MonitorRow(r["monitor"], r["instance"], r["params"], float(r["lhs"]),
                       float(r["rhs_shape"]), float(r["ratio"])) for r in rows]


# ---- individual monitors ----------------------------------------------------------------

def min_sum_monitor(tags=("sqrt2", "golden"), conv_index=range(3, 7), Ys=(100, 1000)):
    rows = []
    for tag in tags:
        alpha = FixedReal.from_tag(tag)
        convs = convergents(alpha, max(conv_index) + 1)
        for i in conv_index:
            q = convs[i]
            for Y1 in Ys:
                for Y2 in Ys:
                    d = min_sum_diagnostic(alpha, q, Y1, Y2)
                    rows.append(MonitorRow.make("min-sum", f"{tag}:q{i}={q.Q}:Y1={Y1}:Y2={Y2}",
                                                {"alpha": tag, "q": q.Q, "Y1": Y1, "Y2": Y2},
                                                d.lhs, d.rhs_shape))
    return rows


def s_of_x_monitor(alpha, beta, Xs, theta=0.3):
    """|S(X)| against X / log^2 X at demo geometry, xi = lower Rosser weights."""
    rows = []
    a = FixedReal.parse(alpha)
    for X in Xs:
        p = Params.demo_sieve(X, theta)
        cup = cup_build(p)
        c = c_from_cup(cup, FixedReal.parse(beta))
        xi = rosser_build(p.z, p.D, "lower")
        rep = S_of_X(xi, c, a, p)
        rows.append(MonitorRow.make("S(X)", f"X={X}", {**p.as_dict(), "alpha": a.spec},
                                    abs(rep.value), X / math.log(X) ** 2))
    return rows


def xj_monitor(alpha, params: Params, count=12):
    """X_j implied by each certified convergent (value or log2 when out of reach)."""
    rows = []
    a = FixedReal.parse(alpha)
    for i, q in enumerate(convergents(a, count)):
        rep = xj_from_convergent(q, params)
        rows.append(MonitorRow.make("X_j", f"q{i}={q.Q}",
                                    {"alpha": a.spec, "theta": params.theta, "mode": params.mode,
                                     "exponent": str(rep.exponent), "computable": rep.computable},
                                    rep.log2_X, math.log2(params.X)))
    return rows


def type_sum_monitor(alpha, beta, X, theta=0.3, K=64, seed=0):
    """|S_I| and |S_II| on dyadic boxes with M L ~ X, against X (the shape X^(1-varpi) at varpi -> 0)."""
    rng = np.random.default_rng(seed)
    p = Params.demo_sieve(X, theta)
    cup = cup_build(p)
    c = c_from_cup(cup, FixedReal.parse(beta), K=min(K, cup.H_int))
    xi = rosser_build(p.z, p.D, "lower")
    a = FixedReal.parse(alpha)
    tab = build_factor_table(1, X + 1)
    rows = []
    j = 1
    while (1 << (j + 1)) <= X:
        M = 1 << j
        L = X // (2 * M)
        if L < 1:
            break
        mu = tab.mu[M:2 * M].astype(np.float64)  # a_m = mu(m), m in (M, 2M]
        spec = TypeSumSpec(X, M, 2 * M, L, 2 * L, mu)
        s1 = type_sums_brute(spec, a, c, xi)
        rows.append(MonitorRow.make("S_I", f"X={X}:M={M}:L={L}",
                                    {"X": X, "M": M, "L": L, "K": c[0].size}, abs(s1), X))
        b = np.sign(rng.standard_normal(L))  # bounded b_l
        s2 = type_sums_brute(TypeSumSpec(X, M, 2 * M, L, 2 * L, mu, b), a, c, xi)
        rows.append(MonitorRow.make("S_II", f"X={X}:M={M}:L={L}",
                                    {"X": X, "M": M, "L": L, "K": c[0].size, "seed": seed}, abs(s2), X))
        j += 2
    return rows


def expsum_monitors(alpha="sqrt2", beta="0", Xs=(10 ** 4, 3 * 10 ** 4), theta=0.3, seed=0) -> MonitorLedger:
    """The full expsum monitor suite."""
    led = MonitorLedger()
    led.extend(min_sum_monitor())
    led.extend(s_of_x_monitor(alpha, beta, Xs, theta))
    led.extend(xj_monitor(alpha, Params.paper(max(Xs))))
    led.extend(type_sum_monitor(alpha, beta, min(Xs), theta, seed=seed))
    return led
