"""Exception types raised across the package."""


class ProphetError(Exception):
    """Base class for every error raised by this package."""


class UnknownFamily(ProphetError, ValueError):
    pass


class InvalidParameters(ProphetError, ValueError):
    pass


class DiscreteNotInvertible(ProphetError, TypeError):
    """A quantile-dependent path was handed a discrete distribution."""


class OutOfRange(ProphetError, ValueError):
    pass


class EmptyList(ProphetError, ValueError):
    pass


class DiscreteComponent(ProphetError, TypeError):
    pass


class InvalidCount(ProphetError, ValueError):
    pass


class NotDecreasing(ProphetError, ValueError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"h is not strictly decreasing at grid index {index}")


class NotNormalized(ProphetError, ValueError):
    pass


class ScheduleMismatch(ProphetError, ValueError):
    pass


class LengthMismatch(ProphetError, ValueError):
    pass


class EmptyInstance(ProphetError, ValueError):
    pass


class TooFewCopies(ProphetError, ValueError):
    pass


class NotPartitioned(ProphetError, ValueError):
    pass


class SubsetMissingType(ProphetError, ValueError):
    pass


class InvalidEps(ProphetError, ValueError):
    pass
