"""Exception types raised by spinphase."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericalError(ArithmeticError):
    """A numerical routine failed (eigendecomposition, non-finite result)."""
