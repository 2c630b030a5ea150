"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DimensionMismatch(ValueError):
    """Vectors or configurations with incompatible dimensions were combined."""


class UnsupportedNorm(ValueError):
    """The requested operation is not available for this norm."""


class ResourceCapExceeded(RuntimeError):
    """An exact solver or enumeration would exceed its configured size cap."""


class InvariantViolation(ValueError):
    """Input data breaks a structural invariant required by an operation."""
