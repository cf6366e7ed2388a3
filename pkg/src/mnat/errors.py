"""Exception hierarchy shared by all modules."""


class MnatError(Exception):
    """Base class for every error raised by :mod:`mnat`."""


class CapExceeded(MnatError):
    """An exhaustive scan would visit more points than the configured cap."""


class EmptyIntersection(MnatError):
    pass


class NonConcaveTable(MnatError):
    pass


class BaseEnumerationCapExceeded(MnatError):
    pass


class ExchangeAxiomViolation(MnatError):
    pass


class InfeasibleDirection(MnatError):
    """A selector proposed a step that leaves the feasible region."""


class RangeViolation(MnatError):
    pass


class BudgetTooSmall(MnatError):
    pass


class GroundSetTooLarge(MnatError):
    pass


class InstanceError(MnatError):
    """Malformed instance or matroid document."""
