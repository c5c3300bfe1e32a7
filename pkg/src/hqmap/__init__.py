"""Numerical analysis of harmonic quasiconformal maps of the unit disk."""

from ._backend import BACKEND
from .errors import (CertificateUnavailableError, DegenerateCurveError, DomainError, HQMapError,
                     InputError, InvalidCurveError, PreconditionError, PrecisionWarning, RangeError)

__version__ = "0.1.0"

__all__ = ["BACKEND", "CertificateUnavailableError", "DegenerateCurveError", "DomainError", "HQMapError",
           "InputError", "InvalidCurveError", "PreconditionError", "PrecisionWarning", "RangeError",
           "__version__"]
