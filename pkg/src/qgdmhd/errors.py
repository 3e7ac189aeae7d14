"""Exception types shared across the package."""


class QgdMhdError(Exception):
    """Base class for all package errors."""


class ThermoDomainError(QgdMhdError, ValueError):
    """Thermodynamic input outside the admissible set (rho > 0, theta > 0)."""


class NonPhysicalStateError(QgdMhdError, RuntimeError):
    """A field state left the admissible set during a computation."""


class ShapeError(QgdMhdError, ValueError):
    """Field shape does not match the grid it is used with."""


class ConfigurationError(QgdMhdError, ValueError):
    """Invalid run configuration or manufactured-field specification."""
