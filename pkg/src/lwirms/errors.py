"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NoBoundModeError(DomainError):
    """The metal/dielectric pair supports no bound surface mode."""


class DimensionError(ValueError):
    """Two frames or maps do not have matching dimensions."""


class CalibrationError(ValueError):
    """A calibration fit is underdetermined or cannot be inverted."""
