"""Exception hierarchy.

Every precondition failure raised by the library derives from
:class:`MtailsError`, which is itself a :class:`ValueError`, so callers can
catch the whole family at once.
"""


class MtailsError(ValueError):
    """Base class for all library errors."""


class DomainError(MtailsError):
    """An argument lies outside the domain of the operation."""


class PreconditionFailed(MtailsError):
    """A stated assumption of a bound does not hold for the given inputs."""


class NonFinite(MtailsError):
    pass


class AsymmetricInput(MtailsError):
    pass


class EigFailure(MtailsError):
    pass


class NotPositiveDefinite(MtailsError):
    pass


class NotPSD(MtailsError):
    pass


class ZeroMatrix(MtailsError):
    pass


class ShapeMismatch(MtailsError):
    pass


class AllZeroColumns(MtailsError):
    pass


class PlanMismatch(MtailsError):
    pass


class TooLarge(MtailsError):
    """Exact enumeration would exceed the sequence cap."""


class Divergent(MtailsError):
    """The moment generating function is infinite at the requested point."""


class UnknownMoments(MtailsError):
    """The ensemble cannot supply the statistics a check needs."""
