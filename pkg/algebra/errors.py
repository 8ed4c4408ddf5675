# algebra/errors.py
from __future__ import annotations


class GlobactError(Exception):
    """Base class for every failure raised by the algebra package."""


class RingSpecError(GlobactError, ValueError):
    """Malformed ring spec, non-prime or non-monic parameters, zero ring."""


class MixedRingError(GlobactError, ValueError):
    """Operands come from different rings or have different dimensions."""


class CapExceeded(GlobactError):
    def __init__(self, what: str, cap: int, reached: int):
        self.what = what
        self.cap = cap
        self.reached = reached
        super().__init__(f"{what}: cap {cap} exceeded (reached {reached})")


class EndpointMismatch(GlobactError, ValueError):
    """Path endpoints do not fit together."""


class NotInSubgroup(GlobactError, ValueError):
    """A membership precondition failed."""


class InternalInconsistency(GlobactError):
    """A fact that must hold for any correct computation did not."""
