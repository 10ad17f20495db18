"""Exception hierarchy.

Every certified computation either returns a value with a sound enclosure or
raises one of these. Nothing here is ever swallowed silently: undecidable
comparisons and failed preconditions must surface to the caller, because the
downstream bounds are exponential in the quantities being decided.
"""

from __future__ import annotations


class TameBoundsError(Exception):
    """Base class for all package errors."""


class BoundaryUndecidable(TameBoundsError):
    """A strict comparison could not be decided within the precision cap.

    Carries the last enclosure inspected so callers can report it.
    """

    def __init__(self, message: str, enclosure: object = None):
        super().__init__(message)
        self.enclosure = enclosure


class TailUndecidable(TameBoundsError):
    """An infinite tail sum was requested for a weight that cannot certify one."""


class InvalidRange(TameBoundsError):
    """Sum index out of the documented domain (m = 0 is not a valid start)."""


class Inconclusive(TameBoundsError):
    """Enclosures overlap; the verdict is neither certified true nor false."""


class ChainInvalid(TameBoundsError):
    """A claimed derivative zero exceeds the zero tolerance."""


class ConditionFails(TameBoundsError):
    """A theorem precondition could not be certified; the bound is not claimed."""


class EmptySet(TameBoundsError):
    """A set argument has zero measure where positive measure is required."""


class DegenerateBody(TameBoundsError):
    """A convex body argument has zero volume."""


class BadExponents(TameBoundsError):
    """Exponent pair (p, q) outside 0 < q < p <= inf."""


class ZeroInBall(TameBoundsError):
    """min |f| over the ball could not be certified positive."""


class ShapeUnsupported(TameBoundsError):
    """Operation defined only for a specific body shape."""


class OutsideDomain(TameBoundsError):
    """Evaluation point or segment leaves the function's domain."""


class DerivativeUnavailable(TameBoundsError):
    """The function family cannot produce a derivative of the requested order."""


class ParseError(TameBoundsError):
    """A spec string does not conform to its grammar."""


class DomainError(TameBoundsError):
    """Argument lies outside the range where a formula is proved."""
