"""Exception types shared across the package."""


class KGLabError(Exception):
    """Base class for all package errors."""


class ConfigError(KGLabError):
    """Invalid or inconsistent experiment configuration."""


class WindowDepthError(KGLabError):
    """A time window is too shallow for the requested derivative order."""


class SupportError(KGLabError):
    """Field support touches or approaches the domain boundary."""


class InstabilityError(KGLabError):
    """Time integration blew up (sup-norm growth beyond the abort factor)."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class AdmissibilityError(KGLabError):
    """Perturbation coefficients violate the smallness condition."""


class IterationDivergenceError(KGLabError):
    """Successive iterates stopped contracting."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate
