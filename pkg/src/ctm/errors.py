"""Exception hierarchy shared by every module."""

from __future__ import annotations


class CtmError(Exception):
    """Base class for all library errors."""


class DomainError(CtmError, ValueError):
    """An alternative or reference lies outside the declared domain."""


class ConstructionError(CtmError, ValueError):
    """An object could not be built from the supplied parameters."""


class ArityError(CtmError, ValueError):
    """A check requires a different number of categories."""


class PreconditionError(CtmError):
    """The inputs do not satisfy the hypotheses of the requested check."""


class RangeError(CtmError, ValueError):
    """A target utility is outside the range reachable on the search interval."""


class OracleError(CtmError):
    """A preference or choice oracle could not answer a query."""


class DegenerateError(CtmError):
    """An oracle is locally constant where a direction was expected."""


class ThresholdError(CtmError):
    """No discontinuity exceeded the jump threshold but one was required."""


class UnsupportedError(CtmError):
    """No construction strategy is registered for the requested object."""


class ExhaustionError(CtmError):
    """Too many draws were rejected while sampling."""


class ConsistencyError(CtmError, ValueError):
    """Stored data disagrees with a recomputation."""
