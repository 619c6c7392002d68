"""Command-line front end.

Commands: verify, search, report, expsum-monitors, convergents. A run is
described by one JSON config ("schema": "1"); flags override its fields.
Exit codes: 0 success, 1 verification failure (or rejected config),
2 precision failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import DomainError, PrecisionError, PrecisionWarning, ResourceError, VerificationError
from .ntcore.fixedreal import FixedReal
from .ntcore.params import DEMO_SIEVE, MODES, THETA_MAX, Params

SCHEMA = "1"
EXIT_OK, EXIT_VERIFY, EXIT_PRECISION, EXIT_CAP = 0, 1, 2, 3
REPORT_CAP = 10 ** 7
DEFAULT_THETA = {"paper": float(THETA_MAX) / 2, "demo": 0.3}


@dataclass(frozen=True)
class RunConfig:
    mode: str = "paper"
    alpha: str = "sqrt2"
    beta: str = "0"
    theta: float | None = None
    X: int = 10 ** 4
    lo: int | None = None
    hi: int | None = None
    precision: int = 256
    seed: int = 0
    out: str | None = None
    monitors: bool = True
    kappa: float | None = None
    filter: str = "plain"
    K: int | None = None
    count: int = 12
    schema: str = SCHEMA

    def __post_init__(self):
        self.validate()

    @property
    def theta_value(self) -> float:
        return DEFAULT_THETA[self.mode] if self.theta is None else float(self.theta)

    @property
    def window(self) -> tuple[int, int]:
        lo = self.X // 2 if self.lo is None else int(self.lo)
        hi = self.X if self.hi is None else int(self.hi)
        return lo, hi

    def validate(self):
        if self.schema != SCHEMA:
            raise DomainError(f"unsupported config schema {self.schema!r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        th = self.theta_value
        if self.mode == "paper" and not 0 < th < float(THETA_MAX):
            raise DomainError(f"paper mode requires 0 < theta < 10/1561, got {th}")
        if th < 0:
            raise DomainError("theta must be >= 0")
        if self.precision < 64:
            raise DomainError("precision must be >= 64 bits")
        if self.filter not in ("plain", "sieved"):
            raise DomainError("filter must be plain or sieved")
        FixedReal.parse(self.alpha, 64)
        FixedReal.parse(self.beta, 64)

    def params(self, X: int | None = None) -> Params:
        """Paper mode keeps the fixed exponent set; demo mode uses the desk-scale sieve."""
        X = self.X if X is None else X
        extra = {} if self.kappa is None else {"kappa": self.kappa}
        if self.mode == "paper":
            return Params(X=X, theta=self.theta_value, mode="paper", **extra)
        return Params(X=X, theta=self.theta_value, mode="demo", **{**DEMO_SIEVE, **extra})

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _out_path(cfg: RunConfig, name):
    if not cfg.out:
        return None
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


# ---- commands ---------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    """Constant certificate, S0, and the cup property suite."""
    from .cup import cup_build, fourier_vs_spline, sample_points
    from .rosser import frak_S0, verify_constants

    params = cfg.params()
    report = verify_constants(params)
    checks = [dict(c.__dict__) for c in report.checks]
    s0 = frak_S0(params)
    # cup suite at demo geometry (paper-mode Delta exceeds 1/4 at desk scale)
    cup_X = min(cfg.X, 10 ** 6) if cfg.mode == "demo" else 10 ** 4
    cup_theta = cfg.theta_value if cfg.mode == "demo" else DEFAULT_THETA["demo"]
    cup = cup_build(Params.demo(max(cup_X, 100), cup_theta))
    pts = sample_points(cup, 200, seed=cfg.seed)
    fc = fourier_vs_spline(cup, pts, [cup.H_int])[0]
    gk = np.abs(cup.coeff(0) - cup.Delta) == 0 and bool(np.all(
        np.abs([cup.coeff(k) for k in range(1, 2001)]) <= cup.Delta))
    checks.append({"name": "cup-fourier", "passed": fc.ok, "value": repr(fc.max_diff),
                   "detail": f"X={cup.X} theta={cup_theta} K={fc.K} tail={fc.tail_bound:.3e} "
                             f"roundoff={fc.roundoff:.3e}"})
    checks.append({"name": "cup-coefficients", "passed": bool(gk), "value": repr(cup.Delta),
                   "detail": "g(0) = Delta and |g(k)| <= Delta for k <= 2000"})
    passed = all(c["passed"] for c in checks)
    first = next((c["name"] for c in checks if not c["passed"]), None)
    cert = {"schema": SCHEMA, "command": "verify", "config": cfg.to_json(), "passed": passed,
            "first_failure": first, "checks": checks,
            "S0": {"value": s0.value, "closed_integral": s0.closed_integral,
                   "simpson_integral": s0.simpson_integral, "margin": s0.margin},
            "constants_sha256": report.as_dict()["sha256"]}
    text = _dump(cert, _out_path(cfg, "certificate.json"))
    print(text, end="")
    if not passed:
        print(f"verification failed: {first}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_search(cfg: RunConfig) -> int:
    from .search import search_solutions

    lo, hi = cfg.window
    res = search_solutions(cfg.alpha, cfg.beta, cfg.theta_value, (lo, hi), filter=cfg.filter,
                           bits=cfg.precision)
    csv_path = _out_path(cfg, "search.csv")
    if csv_path:
        res.write_csv(csv_path)
        res.write_json(_out_path(cfg, "search.json"))
    s = res.summary()
    print(f"window ({lo}, {hi}] primes {s['primes']} accepted {s['accepted']} "
          f"min_norm {s['min_norm']!r} dropped {s['dropped']}")
    if res.dropped:
        for p, why in res.dropped:
            print(f"dropped p={p}: {why}", file=sys.stderr)
        return EXIT_PRECISION
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    from .cup import cup_build
    from .expsum.monitors import MonitorLedger, expsum_monitors
    from .gamma import gamma_of_X, lower_bound_assembly

    if cfg.X > REPORT_CAP:
        raise ResourceError(f"report is capped at X <= {REPORT_CAP} (exact evaluation), got X={cfg.X}")
    params = cfg.params()
    cup = cup_build(params)
    rep = gamma_of_X(params, FixedReal.parse(cfg.alpha, cfg.precision),
                     FixedReal.parse(cfg.beta, cfg.precision), cup, K=cfg.K)
    doc = {"schema": SCHEMA, "command": "report", "config": cfg.to_json(), "report": rep.as_dict()}
    if cfg.monitors:
        led = MonitorLedger()
        led.extend(lower_bound_assembly(params, rep))
        Xs = tuple(x for x in (10 ** 4, 3 * 10 ** 4) if x <= max(cfg.X, 10 ** 4))
        led.extend(expsum_monitors(cfg.alpha, cfg.beta, Xs, cfg.theta_value if cfg.mode == "demo"
                                   else DEFAULT_THETA["demo"], seed=cfg.seed).rows)
        path = _out_path(cfg, "monitors.csv")
        if path:
            led.write_csv(path)
        doc["monitors"] = {"rows": len(led.rows), "all_finite": led.all_finite, "csv": path}
        if not led.all_finite:
            raise VerificationError("monitors-finite", "a monitor ratio is not finite")
    print(_dump(doc, _out_path(cfg, "report.json")), end="")
    return EXIT_OK


def cmd_expsum_monitors(cfg: RunConfig) -> int:
    from .expsum.monitors import expsum_monitors

    theta = cfg.theta_value if cfg.mode == "demo" else DEFAULT_THETA["demo"]
    led = expsum_monitors(cfg.alpha, cfg.beta, (10 ** 4, 3 * 10 ** 4), theta, seed=cfg.seed)
    path = _out_path(cfg, "expsum_monitors.csv")
    if path:
        led.write_csv(path)
    for name in sorted({r.monitor for r in led.rows}):
        print(f"{name}: rows {sum(r.monitor == name for r in led.rows)} max_ratio {led.max_ratio(name)!r}")
    if not led.all_finite:
        raise VerificationError("monitors-finite", "a monitor ratio is not finite")
    return EXIT_OK


def cmd_convergents(cfg: RunConfig) -> int:
    from .expsum.sums import thresholds
    from .ntcore.diophantine import convergents, xj_from_convergent

    alpha = FixedReal.parse(cfg.alpha, cfg.precision)
    params = cfg.params()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PrecisionWarning)
        convs = convergents(alpha, cfg.count)
    th = thresholds(params)
    rows = []
    for q in convs:
        xj = xj_from_convergent(q, params)
        rows.append({"A": q.A, "Q": q.Q, "dirichlet": q.satisfies_dirichlet(alpha),
                     "Xj": xj.value, "log2_Xj": xj.log2_X, "computable": xj.computable,
                     "meets_Q_target": q.Q >= th.Q_target})
    doc = {"schema": SCHEMA, "command": "convergents", "alpha": alpha.spec, "bits": alpha.bits,
           "theta": params.theta, "D0_exponent": str(th.D0_exponent),
           "Q_exponent": str(th.Q_exponent), "convergents": rows}
    print(_dump(doc, _out_path(cfg, "convergents.json")), end="")
    if len(convs) < cfg.count:
        print(f"precision exhausted after {len(convs)} convergents", file=sys.stderr)
        return EXIT_PRECISION
    return EXIT_OK if not caught else EXIT_PRECISION


COMMANDS = {
    "verify": cmd_verify,
    "search": cmd_search,
    "report": cmd_report,
    "expsum-monitors": cmd_expsum_monitors,
    "convergents": cmd_convergents,
}


# ---- argument handling --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON RunConfig file")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--alpha", help="symbolic tag (sqrt2, golden, e, pi), decimal, or a/b")
    common.add_argument("--beta")
    common.add_argument("--theta", type=float)
    common.add_argument("--x", dest="X", type=int, help="scale X; windows default to (X/2, X]")
    common.add_argument("--lo", type=int)
    common.add_argument("--hi", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--precision", type=int, help="fixed-point bits")
    common.add_argument("--seed", type=int)
    common.add_argument("--kappa", type=float, help="override kappa (mutation experiments)")
    common.add_argument("--filter", choices=("plain", "sieved"))
    common.add_argument("--K", type=int, help="Fourier truncation for report (default H)")
    common.add_argument("--count", type=int, help="number of convergents")
    common.add_argument("--no-monitors", dest="monitors", action="store_false", default=None)
    parser = argparse.ArgumentParser(prog="primefrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns) -> RunConfig:
    doc = {}
    if ns.config:
        with open(ns.config) as fh:
            doc = json.load(fh)
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            doc[f.name] = v
    return RunConfig.from_json(doc)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (DomainError, TypeError, ValueError) as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if FixedReal.parse(cfg.alpha, 64).is_rational:
        warnings.warn(f"alpha={cfg.alpha!r} is rational: lemma checks that rely on ||alpha n|| > 0 "
                      "may fail or degenerate", PrecisionWarning, stacklevel=1)
    try:
        return COMMANDS[ns.command](cfg)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except PrecisionError as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
