"""Exception types shared across the package."""


class FenceError(Exception):
    """Base class for all package errors."""


class DomainError(FenceError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedInputError(FenceError, ValueError):
    """Input is well formed but not handled by the operation."""


class CapacityError(FenceError, RuntimeError):
    """The requested exhaustive search exceeds the configured cap."""


class GeometryError(FenceError, ValueError):
    """A polygonal loop is degenerate or self-intersecting."""
