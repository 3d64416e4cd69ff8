"""Exception types shared across the package."""


class FilicohError(Exception):
    """Base class for all package errors."""


class ConfigError(FilicohError):
    """Bad configuration: unknown preset, malformed algebra file, failed Jacobi gate."""


class UsageError(FilicohError):
    """Caller violated a precondition: arity mismatch, unsupported degree,
    non-cocycle input, dimension mismatch."""


class NotACocycleError(UsageError):
    """A requested family or leading term does not satisfy the cocycle identities."""


class UnstableError(FilicohError):
    """A truncated computation failed to stabilise across cutoffs."""
