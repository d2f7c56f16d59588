"""Exception hierarchy.

Every error raised on bad input derives from :class:`ValidationError`, so
callers (the CLI in particular) can catch one class and report the concrete
subclass name.
"""


class NcThetaError(Exception):
    """Base class for all package errors."""


class ValidationError(NcThetaError, ValueError):
    """Input violates a documented precondition."""


class NotSymmetric(ValidationError):
    pass


class ImNotPositiveDefinite(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IrrationalBasis(ValidationError):
    pass


class PointNotInLattice(ValidationError):
    pass


class LatticeMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NotOneDimensional(ValidationError):
    pass


class NotIntegrable(ValidationError):
    pass


class NotProportional(NcThetaError):
    """A commutator that should be a scalar multiple of its argument is not.

    Never expected for Gaussian inputs; signals an internal bug.
    """
