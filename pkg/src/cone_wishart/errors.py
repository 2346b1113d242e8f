"""Exception and warning types raised across the package."""


class ConeWishartError(Exception):
    """Base class for all package errors."""


class AlgebraMismatch(ConeWishartError, ValueError):
    pass


class SingularElement(ConeWishartError, ValueError):
    pass


class NotInCone(ConeWishartError, ValueError):
    pass


class Unsupported(ConeWishartError, NotImplementedError):
    pass


class NonpositiveMinor(ConeWishartError, ValueError):
    pass


class DomainError(ConeWishartError, ValueError):
    pass


class PartitionTooLong(ConeWishartError, ValueError):
    pass


class DivergentSeries(ConeWishartError, ValueError):
    pass


class SchemaError(ConeWishartError, ValueError):
    """Malformed or inconsistent serialized input."""


class NotConvergedWarning(UserWarning):
    """A truncated series stopped at ``max_degree`` before meeting its tail rule."""


class ShapeConventionWarning(UserWarning):
    """Shape parameter is integrable but below the nominal ``n - r`` bound."""
