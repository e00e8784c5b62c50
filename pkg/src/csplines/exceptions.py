"""Exception hierarchy shared across the package."""


class CSplineError(Exception):
    """Base class for all errors raised by csplines."""


class DomainError(CSplineError, ValueError):
    """An index, parameter or configuration lies outside its valid range."""


class OutOfDomainError(DomainError):
    """A data point falls outside the closed rectangular domain.

    Attributes
    ----------
    row : int or None
        Zero-based index of the offending record, when known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SchemaError(CSplineError, ValueError):
    """A model document is malformed or violates model invariants."""


class RankDeficiencyWarning(UserWarning):
    """The design matrix has fewer independent columns than basis functions."""


class ExtrapolationWarning(UserWarning):
    """Prediction points outside the domain were evaluated in the nearest cell."""
