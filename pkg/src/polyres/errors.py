"""Exception hierarchy shared by all modules."""


class PolyresError(Exception):
    pass


class PresentationSyntaxError(PolyresError, SyntaxError):
    """Malformed presentation file."""


class TypingError(PolyresError):
    pass


class NonAssociativeTable(PolyresError):
    pass


class InvalidTruncation(PolyresError):
    pass


class StepBudgetExceeded(PolyresError):
    pass


class NotConvergent(PolyresError):
    pass


class NotTerminating(NotConvergent):
    pass


class NotReduced(PolyresError):
    pass


class MismatchedEndpoints(PolyresError):
    pass


class DimMismatch(PolyresError):
    pass


class BoundaryMismatch(PolyresError):
    pass


class InvBelowDim2(PolyresError):
    pass


class DimBudgetExceeded(PolyresError):
    pass


class MissingLowerCells(PolyresError):
    pass


class MissingCells(PolyresError):
    pass


class DegreeOutOfRange(PolyresError):
    pass
