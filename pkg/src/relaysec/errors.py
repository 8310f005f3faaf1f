"""Exception types raised by relaysec."""


class RelaySecError(ValueError):
    """Base class for every input error raised by the package."""


class DomainError(RelaySecError):
    """An argument lies outside the domain of the operation."""


class DegenerateLinkError(DomainError):
    """A link distance is zero, so its mean channel gain is infinite."""


class UnsupportedValueError(DomainError):
    """The operation has no exact form for the requested parameter."""


class ConstraintViolationError(DomainError):
    """A configured constraint (e.g. the relay power cap) is violated."""
