"""Semantic exception hierarchy shared across the package."""


class BucketingError(Exception):
    """Base class for all package errors."""


class NegativeEntry(BucketingError):
    """A probability table contains a negative entry."""


class NotNormalized(BucketingError):
    """A probability table does not sum to one."""


class OutOfRange(BucketingError):
    """A scalar parameter is outside its admissible interval."""


class SupportViolation(BucketingError):
    """A nonnegative table puts mass where the reference matrix has none."""


class DomainError(BucketingError):
    """Arguments violate a documented precondition."""


class MassError(BucketingError):
    """Block masses do not add up to the required total."""


class DimensionMismatch(BucketingError):
    """Two codes or matrices have incompatible shapes."""


class RoundingInfeasible(BucketingError):
    """Integer apportionment of block counts cannot satisfy its constraints."""


class TooLarge(BucketingError):
    """An exact enumeration or assignment would exceed the size guard."""
