"""Exception and warning types raised across orkit."""


class OrkitError(Exception):
    """Base class for all orkit errors."""


class DimensionOverflowError(OrkitError):
    pass


class ShapeError(OrkitError, ValueError):
    pass


class MissingBridgeError(OrkitError, KeyError):
    pass


class InvalidBridgeError(OrkitError, ValueError):
    pass


class ConvergenceError(OrkitError):
    """A series was requested outside its region of convergence."""


class NonConvergenceError(OrkitError):
    """A series did not settle within the allowed number of terms."""


class BoundExceededError(OrkitError):
    """An iteration hit its degree or step bound.

    ``partial`` carries whatever was computed before the bound was hit.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SchemaError(OrkitError, ValueError):
    """A system file failed validation. ``where`` names the offending field."""

    def __init__(self, message, where=""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class RationalizationWarning(UserWarning):
    pass


class NoCertificateError(OrkitError):
    """A candidate realization admits no invariance certificate within bounds."""
