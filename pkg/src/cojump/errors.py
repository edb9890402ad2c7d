"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model, scheme, or tuning parameter."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""
