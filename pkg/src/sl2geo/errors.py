"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the region where an operation is defined."""


class NumericalError(ArithmeticError):
    """A computation left its numerically trustworthy regime."""
