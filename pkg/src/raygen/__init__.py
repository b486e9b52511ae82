"""Explicit bounds for prime generators of ray class group subgroups, with
exhaustive checks over (Z/mZ)^* and imaginary quadratic class groups."""

__version__ = "0.1.0"

from .errors import CertificationError, DomainError, ParentMismatchError, RaygenError, ResourceLimitError  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "RaygenError",
    "DomainError",
    "ResourceLimitError",
    "ParentMismatchError",
    "CertificationError",
]
