"""Exception types raised by the library."""


class DomainError(ValueError):
    """Input outside the domain of an operation (non-finite, out of range, empty)."""


class RangeError(OverflowError):
    """Parameter large enough that double precision results are unreliable."""


class SingularityError(ArithmeticError):
    """A closed-form expression hit a vanishing denominator."""

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class ExcludedDirectionError(DomainError):
    """Momentum along the standard direction k where a construction is undefined."""


class NullOutcomeError(ArithmeticError):
    """A projection annihilated the state (zero detection probability)."""


class EmptyPacketError(DomainError):
    """Every sample of a wave packet was excluded."""


class ConsistencyError(RuntimeError):
    """An internal numerical cross-check failed."""
