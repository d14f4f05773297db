"""Exception hierarchy shared by all workbench modules."""


class WorkbenchError(Exception):
    """Base class for every error this package raises deliberately."""


class SpaceMismatch(WorkbenchError):
    """Two operands were built over different state spaces."""


class UnknownVariable(WorkbenchError):
    """An assignment mentions a variable the space does not declare."""


class MissingVariable(WorkbenchError):
    """An assignment leaves a declared variable without a value."""


class ValueOutOfRange(WorkbenchError):
    """A variable value lies outside its declared range."""


class SpaceTooLarge(WorkbenchError):
    """The requested brute-force check exceeds its size precondition."""


class ExpansionTooLarge(WorkbenchError):
    """Explicit expansion of a down-set would exceed the configured cap."""


class QueryBlowup(WorkbenchError):
    """A hyper-level query needed an explicit expansion beyond the cap."""


class NonSubsetClosedQuery(WorkbenchError):
    """A strict hyper evaluation was given a query outside its contract."""


class IterationBudgetExceeded(WorkbenchError):
    """A fixpoint iteration ran past its budget (should never happen on
    the increasing variants; the otimes variant may legitimately cycle)."""


class NotARefinement(WorkbenchError):
    """refinement check called with R not a subset of S."""


class ElaborationError(WorkbenchError):
    """An atom or guard could not be elaborated over the given space."""


class UndeclaredVariable(ElaborationError):
    """Program text references a variable that was never declared."""


class ParseError(WorkbenchError):
    """Syntax error with source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
