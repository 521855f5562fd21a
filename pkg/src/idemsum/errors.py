"""Exception types raised by idemsum."""


class IdemsumError(Exception):
    """Base class for all errors raised by this package."""


class InvalidOrderError(IdemsumError, ValueError):
    pass


class InvalidFieldError(IdemsumError, ValueError):
    pass


class InvalidRingError(IdemsumError, ValueError):
    """Operation tables violate a ring axiom."""


class CapacityError(IdemsumError):
    """A ring, matrix space or pool exceeds a configured cap."""


class RingMismatchError(IdemsumError, ValueError):
    """Operands live over different rings or have different dimensions."""


class UnsupportedRingError(IdemsumError):
    """The operation is not defined for this kind of ring."""


class InvariantViolation(IdemsumError, AssertionError):
    """An internal consistency check failed."""


class BudgetExceeded(IdemsumError):
    """A cooperative time budget ran out."""
