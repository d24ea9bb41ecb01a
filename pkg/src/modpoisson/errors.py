"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateError(ValueError):
    """A reweighting has zero total mass, so no law can be formed."""


class CapacityError(ValueError):
    """The requested size exceeds the configured memory or enumeration budget."""


class EmptyTableError(ValueError):
    """No primes lie in the requested range."""


class ModelUndefinedError(ValueError):
    """Model constants are undefined at this n (k_n would be 0)."""
