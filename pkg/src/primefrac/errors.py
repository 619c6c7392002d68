"""Exception hierarchy shared by every module.

The CLI maps these onto its exit codes: verification failures exit 1,
precision failures exit 2, resource caps exit 3.
"""


class PrimefracError(Exception):
    pass


class DomainError(PrimefracError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ResourceError(PrimefracError, RuntimeError):
    """A request exceeds a configured size cap (sieve segment, divisor count, X)."""


class PrecisionError(PrimefracError, ArithmeticError):
    """Fixed-point precision is insufficient to certify a result."""


class VerificationError(PrimefracError):
    """An exact identity or inequality that must hold was violated."""

    def __init__(self, check, detail=""):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}" if detail else check)


class PrecisionWarning(UserWarning):
    """A computation returned a partial result because precision ran out."""
