"""Exception types raised across the package."""


class CocycleSpectraError(Exception):
    """Base class for all package errors."""


class SingularMatrix(CocycleSpectraError):
    pass


class NonPositiveDeterminant(CocycleSpectraError):
    pass


class IsometryInput(CocycleSpectraError):
    pass


class BudgetExceeded(CocycleSpectraError):
    pass


class EmptyWord(CocycleSpectraError):
    pass


class EmptySignClass(CocycleSpectraError):
    pass


class InsufficientSupport(CocycleSpectraError):
    pass


class NonHyperbolicWord(CocycleSpectraError):
    pass


class DisjointInput(CocycleSpectraError):
    pass


class NotElliptic(CocycleSpectraError):
    pass


class AsymmetryWarning(UserWarning):
    """Fold discrepancy between the two signed fiber branches exceeds 2*delta."""
