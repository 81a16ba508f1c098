"""Exception types shared across the package."""


class PrimeCyclesError(Exception):
    """Base class for all package-specific errors."""


class ResourceLimitError(PrimeCyclesError):
    """A configured budget (sieve limit, exact-arithmetic range, ...) was exceeded."""


class OutOfRangeError(PrimeCyclesError):
    """A query lies outside the range covered by the supplied table or grid."""


class EmptySupportError(PrimeCyclesError):
    """Sampling was requested from an empty set of objects."""


class NotApplicableError(PrimeCyclesError):
    """An estimator's hypotheses are not met by the supplied inputs."""


class CacheError(PrimeCyclesError):
    """A cache file is malformed or failed revalidation."""
