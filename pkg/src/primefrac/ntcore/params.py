"""The exponent set (delta, rho, eta, kappa, theta) and the scales it induces at X."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError

PAPER_DELTA = Fraction("0.307708")
PAPER_RHO = Fraction("0.23077")
PAPER_ETA = Fraction("0.076928")
PAPER_KAPPA = Fraction("1.4999676")
THETA_MAX = Fraction(10, 1561)
PAPER_S = Fraction(76927, 19232)

MODES = ("paper", "demo")

# Desk-scale sieve exponents: with the fixed ones z = X^eta < 3 for every
# X <= 10^6 and the sieve is empty. These keep s = delta/eta in (2, 4) and
# D/q inside the (1, 3) window of the upper weights.
DEMO_SIEVE = {"eta": 0.2, "rho": 0.3, "delta": 0.55}


def exact(x) -> Fraction:
    """Exact rational for a decimal-looking number (uses the shortest repr of floats)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x))) if isinstance(x, float) else Fraction(str(x))


@dataclass(frozen=True)
class Params:
    """Sieve/exponential-sum geometry at scale X.

    ``mode="paper"`` keeps theta inside (0, 10/1561). ``mode="demo"`` accepts any
    theta > 0 (theta = 0 too, for search) so the cup function is usable at desk
    scale and requires Delta in (0, 1/2); reports carry the mode.
    Exponents other than theta default to the fixed set and may be overridden
    for mutation experiments (``verify_constants`` flags any override).
    """

    X: int
    theta: float
    mode: str = "paper"
    delta: float = float(PAPER_DELTA)
    rho: float = float(PAPER_RHO)
    eta: float = float(PAPER_ETA)
    kappa: float = float(PAPER_KAPPA)

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.X) != self.X or self.X < 2:
            raise DomainError(f"X must be an integer >= 2, got {self.X!r}")
        object.__setattr__(self, "X", int(self.X))
        if not self.theta > 0 and not (self.mode == "demo" and self.theta == 0):
            raise DomainError(f"theta must be positive, got {self.theta}")
        if self.mode == "paper" and not (0 < exact(self.theta) < THETA_MAX):
            raise DomainError(f"paper mode requires 0 < theta < 10/1561, got {self.theta}")
        if not (0 < self.eta < self.rho < self.delta < 1):
            raise DomainError("exponents must satisfy 0 < eta < rho < delta < 1")
        # Paper-mode theta puts Delta above 1/2 for every X below ~10^47, so the
        # Delta window is only enforceable for demo geometry.
        if self.mode == "demo" and self.theta > 0 and not (0 < self.Delta < 0.5):
            raise DomainError(f"Delta = X^-theta = {self.Delta} outside (0, 1/2)")
        if self.H < 1:
            raise DomainError(f"H = {self.H} < 1")

    @classmethod
    def paper(cls, X, theta=float(THETA_MAX) / 2):
        return cls(X=X, theta=theta, mode="paper")

    @classmethod
    def demo(cls, X, theta=0.3, **overrides):
        return cls(X=X, theta=theta, mode="demo", **overrides)

    @classmethod
    def demo_sieve(cls, X, theta=0.3, **overrides):
        """Demo theta plus the desk-scale sieve exponents ``DEMO_SIEVE``."""
        return cls(X=X, theta=theta, mode="demo", **{**DEMO_SIEVE, **overrides})

    @property
    def log_x(self) -> float:
        return math.log(self.X)

    @property
    def z(self) -> float:
        return self.X ** self.eta

    @property
    def y(self) -> float:
        return self.X ** self.rho

    @property
    def D(self) -> float:
        return self.X ** self.delta

    @property
    def Delta(self) -> float:
        return self.X ** (-self.theta)

    @property
    def H(self) -> float:
        return self.log_x ** 2 / self.Delta

    @property
    def H_int(self) -> int:
        return math.floor(self.H)

    @property
    def s(self) -> float:
        return self.delta / self.eta

    @property
    def s_exact(self) -> Fraction:
        return exact(self.delta) / exact(self.eta)

    def is_paper_parameter_set(self) -> bool:
        return (exact(self.delta), exact(self.rho), exact(self.eta), exact(self.kappa)) == (
            PAPER_DELTA, PAPER_RHO, PAPER_ETA, PAPER_KAPPA)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode, "X": self.X, "theta": self.theta,
            "delta": self.delta, "rho": self.rho, "eta": self.eta, "kappa": self.kappa,
            "z": self.z, "y": self.y, "D": self.D, "Delta": self.Delta, "H": self.H,
        }
