"""Exception and warning types raised by hqmap."""


class HQMapError(Exception):
    """Base class for all library errors."""


class InputError(HQMapError, ValueError):
    """Malformed or out-of-range input."""


class InvalidCurveError(InputError):
    """The curve is not a simple closed curve."""


class DegenerateCurveError(HQMapError):
    """Distinct samples are (numerically) coincident."""


class DomainError(InputError):
    """A point lies outside the closed unit disk."""


class PreconditionError(HQMapError):
    """A mathematical precondition of an operation does not hold."""


class CertificateUnavailableError(HQMapError):
    """The Lipschitz certificate cannot be assembled (e.g. non-Dini modulus)."""


class RangeError(HQMapError):
    """The majorant breakpoints cannot be extended far enough."""

    def __init__(self, message, deepest_k):
        super().__init__(message)
        self.deepest_k = deepest_k


class PrecisionWarning(UserWarning):
    """Result is less accurate than requested; carries an error bound."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound
