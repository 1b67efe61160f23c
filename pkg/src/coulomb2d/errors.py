"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DivergenceError(ArithmeticError):
    """An integral failed to converge or is genuinely divergent."""
