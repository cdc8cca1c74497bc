"""
Exception hierarchy shared by every module.

Violations that a check is *asked* to find (a failed additivity check, a
non-semiring family) are report content, not exceptions. The classes below are
for inputs an operation cannot work with at all.
"""


class MeasureError(Exception):
    """Base class for everything raised on purpose by this project."""


# --- INPUT ERRORS ---

class UniverseMismatch(MeasureError):
    """Two sets from different universes were combined."""


class InvalidDescriptor(MeasureError, ValueError):
    """A space, semiring or measure descriptor breaks its own invariants."""


class ParseError(MeasureError, ValueError):
    """A JSON document or value string could not be read."""


# --- DOMAIN ERRORS ---

class NotInDomain(MeasureError):
    """A set was evaluated outside the domain of a set function."""


class NoDecomposition(MeasureError):
    """A set difference is not a finite disjoint union of family members."""

    def __init__(self, message: str, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class NotACover(MeasureError):
    """The pieces of a cover do not contain its target."""


# --- CHECK OUTCOMES ---
# These carry the evidence gathered before the failure.

class PreconditionFailed(MeasureError):
    """A hypothesis of an operation does not hold for the given instance."""

    def __init__(self, message: str, evidence: dict | None = None):
        super().__init__(message)
        self.evidence = evidence or {}


class BudgetExceeded(MeasureError):
    """A search ran past its configured bound.

    `best` holds the best partial answer found so far (if any) and `depth`
    the deepest tail truncation that was tried.
    """

    def __init__(self, message: str, best=None, depth: int | None = None):
        super().__init__(message)
        self.best = best
        self.depth = depth


class CertificationFailed(MeasureError):
    """A certificate could not be produced because an inequality is false.

    `half` names the failing part ("upper", "lower" or "exact"), `truncation`
    the index/depth where it failed and `report` the partial evidence.
    """

    def __init__(self, message: str, half: str, truncation: int | None = None, report: dict | None = None):
        super().__init__(message)
        self.half = half
        self.truncation = truncation
        self.report = report or {}
