"""Exception hierarchy.

Everything a caller can trigger with bad input derives from ``DomainError`` so the
CLI can map it to exit code 1 in one place.
"""


class HypercountError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HypercountError, ValueError):
    """An argument lies outside the domain of the operation."""


# -- parsing ---------------------------------------------------------------

class ParseError(DomainError):
    """Base for problems found while reading instance files."""


class FormatSyntaxError(ParseError):
    """Malformed header or clause line."""


class NonMonotone(ParseError):
    """A negative literal appeared in a monotone formula."""


class EmptyClause(ParseError):
    """A clause line contained only its terminator."""


class IdOutOfRange(ParseError):
    """A variable or vertex id is outside 1..n."""


# -- computation tree ------------------------------------------------------

class FreeVariable(DomainError):
    """The query variable occurs in no clause."""


class IndexOutOfRange(DomainError):
    """A child index (i, j) is outside the occurrence ordering."""


class ForcedQuery(DomainError):
    """The query variable sits in an arity-1 clause, so its ratio is 0."""


class BudgetExceeded(HypercountError):
    """The configured node budget ran out before the evaluation finished."""

    def __init__(self, budget: int):
        super().__init__(f"node budget of {budget} exhausted")
        self.budget = budget


# -- counting --------------------------------------------------------------

class InvalidEps(DomainError):
    """Requested relative error is not positive."""


class TooLarge(DomainError):
    """Instance exceeds the brute-force size limit."""


class NegativeLambda(DomainError):
    """Hard-core activity must be nonnegative."""


# -- analysis --------------------------------------------------------------

class NotSuitable(DomainError):
    """Arity vector is not nondecreasing-then-ones."""


class UnknownName(DomainError):
    """No registry entry has that name."""


class InvalidTolerance(DomainError):
    """Solver tolerance must be positive."""


class NotAntiferromagnetic(DomainError):
    """Two-spin parameters violate beta * gamma < 1."""


class NotRegular(DomainError):
    """Graph is not regular (or has degree 0)."""
