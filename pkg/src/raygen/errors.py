class RaygenError(Exception):
    pass


class DomainError(RaygenError, ValueError):
    """An argument lies outside an operation's domain."""


class ResourceLimitError(RaygenError):
    """A configured limit (sieve, group order, subgroup cap) was exceeded."""


class ParentMismatchError(RaygenError, ValueError):
    pass


class CertificationError(RaygenError):
    """A one-sided inequality expected to hold numerically did not."""
