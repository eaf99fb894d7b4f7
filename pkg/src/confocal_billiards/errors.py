"""Exception hierarchy shared by all modules."""


class BilliardError(Exception):
    """Base class for every error raised by the package."""


class DegenerateCaustic(BilliardError):
    pass


class AudinViolation(BilliardError):
    pass


class DegeneratePoint(BilliardError):
    pass


class NonPositiveConstantTerm(BilliardError):
    pass


class InsufficientOrder(BilliardError):
    pass


class PeriodTooSmall(BilliardError):
    pass


class TypeMismatch(BilliardError):
    pass


class NoSolution(BilliardError):
    pass


class IllConditioned(BilliardError):
    pass


class ComplexRoot(BilliardError):
    pass


class OffBoundary(BilliardError):
    pass


class TangentLine(BilliardError):
    pass


class DegenerateLine(BilliardError):
    pass


class NoTangentDirection(BilliardError):
    pass


class AmbiguousEvent(BilliardError):
    pass


class SingularSystem(BilliardError):
    pass
