"""Exception hierarchy shared by every module."""


class SteinhausError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SteinhausError, ValueError):
    """Operands live in spaces of different dimension."""


class GeometryError(SteinhausError, ValueError):
    """Invalid body, norm, functional or degenerate geometric input."""


class NotOnBoundaryError(GeometryError):
    pass


class OracleInconsistency(SteinhausError, RuntimeError):
    """A membership oracle contradicted a bound it should satisfy."""


class PlanePathError(SteinhausError, ValueError):
    """The path lies (within tolerance) in a level set of the functional."""


class NoWindowError(PlanePathError):
    pass


class CertificateError(SteinhausError, ArithmeticError):
    """Numerical failure while building a witness certificate.

    ``term`` names the offending quantity and ``value`` is its computed value.
    """

    def __init__(self, message, term=None, value=None):
        super().__init__(message)
        self.term = term
        self.value = value


class GridMemoryError(SteinhausError, MemoryError):
    def __init__(self, message, extents=None):
        super().__init__(message)
        self.extents = extents


class BlowupError(SteinhausError, RuntimeError):
    pass


class ConfigError(SteinhausError, ValueError):
    pass
