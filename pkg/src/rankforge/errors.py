"""Exception hierarchy shared by all rankforge modules.

Every error carries a short machine-readable ``code`` (used by the HTTP
service to build error envelopes) and an optional ``location`` string
pointing at the offending row/column/field.
"""

from __future__ import annotations


class RankforgeError(Exception):
    """Base class for all rankforge errors."""

    code = "error"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.location = location


class SchemaError(RankforgeError):
    """Missing/unknown identifiers or malformed documents."""

    code = "schema"


class ValidationError(RankforgeError):
    """An invariant or precondition does not hold."""

    code = "validation"


class NoBaselineError(RankforgeError):
    """A relative change was requested without a previous-year value."""

    code = "no_baseline"


class TrainingError(RankforgeError):
    """Model fitting cannot proceed (e.g. too few rows for an indicator)."""

    code = "training"


class ContractError(RankforgeError):
    """Ensemble inputs violate a cross-object contract (mismatched M)."""

    code = "contract"


class CapacityError(RankforgeError):
    """Scenario generation would exceed the configured cap.

    ``count`` reports the exact cartesian-product size that was requested.
    """

    code = "capacity"

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class DomainBoundsError(RankforgeError):
    """A perturbation leaves the attribute domain on both sides."""

    code = "domain"


class RivalMethodError(RankforgeError):
    """A rival prediction method cannot run on the given history."""

    code = "method"


class SessionError(RankforgeError):
    """Session persistence problems: bad version, conflict, unknown id."""

    code = "session"
