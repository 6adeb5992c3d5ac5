"""Exception types raised across the package."""


class TunnelForceError(Exception):
    """Base class for all package errors."""


class DomainError(TunnelForceError, ValueError):
    """Physical parameters outside their allowed domain."""


class ResonanceError(TunnelForceError, ArithmeticError):
    """A round-trip denominator vanished exactly on the evaluation path.

    Attributes
    ----------
    location : complex
        Wavenumber (or integration variable) at which the pole was hit.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DegenerateBranchError(TunnelForceError, ArithmeticError):
    """Zero wavenumber at an interface; the plane-wave basis degenerates."""


class ConvergenceError(TunnelForceError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    Carries the partial result so that callers can decide what to do with it.
    """

    def __init__(self, message, value=None, error=None, diagnostics=None):
        super().__init__(message)
        self.value = value
        self.error = error
        self.diagnostics = diagnostics or {}


class GeometryError(TunnelForceError, ValueError):
    """Invalid or under-resolved geometry (e.g. insufficient box padding)."""


class FlatProfileError(TunnelForceError, RuntimeError):
    """No interior extremum was found in a one-dimensional search."""
