"""Hilbert transform on the circle: principal-value quadrature and Fourier multiplier.

Sign convention: H(cos) = sin, i.e. the multiplier is -i sgn(n).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import _backend
from .errors import InputError, PreconditionError
from .harmonic import analyze, harmonic_conjugate, poisson_quadrature
from .modulus import dini_integral, modulus_of_continuity


@dataclass
class CircleFunction:
    """N uniform samples of a 2pi-periodic function."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        n = self.values.size
        if self.values.ndim != 1 or n < 4 or n & (n - 1):
            raise InputError("circle functions need a power-of-two number of samples")

    @classmethod
    def from_function(cls, fn, N):
        return cls(fn(2 * np.pi * np.arange(N) / N))

    @property
    def N(self):
        return self.values.size

    @property
    def grid(self):
        return 2 * np.pi * np.arange(self.N) / self.N

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _values(fn):
    v = np.asarray(fn.values if isinstance(fn, CircleFunction) else fn)
    n = v.size
    if v.ndim != 1 or n < 4 or n & (n - 1):
        raise InputError("need a power-of-two number of samples")
    return v


def hilbert_spectral(fn):
    """Multiplier route: c_n -> -i sgn(n) c_n, with the mean and Nyquist modes dropped."""
    v = _values(fn)
    n = v.size
    sgn = np.sign(np.fft.fftfreq(n, 1.0 / n))
    sgn[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(v) * (-1j * sgn))
    return out.real if np.isrealobj(v) else out


def _pv_rule(n, stride, backend):
    h = 2 * np.pi / n
    k = np.arange(n // (4 * stride))
    offsets = stride * (2 * k + 1)
    t = offsets * h
    weights = -(1 / np.pi) * (2 * stride * h) / (2 * np.tan(t / 2))
    return offsets, weights


def hilbert_pv(fn, return_error=False, backend=None):
    """Principal-value quadrature of -(1/pi) int_0^pi [chi(tau+t) - chi(tau-t)] / (2 tan(t/2)) dt.

    Midpoint rule with panels of width 2h whose nodes sit at odd multiples of the
    grid step, so the singular point t = 0 is never sampled. The error estimate is
    the Richardson difference against the same rule at twice the panel width.
    """
    v = _values(fn)
    n = v.size
    if n < 128:
        raise InputError("hilbert_pv needs N >= 128")
    vc = v.astype(complex)
    fine = _backend.odd_difference_sum(vc, *_pv_rule(n, 1, backend), backend=backend)
    out = fine.real if np.isrealobj(v) else fine
    if not return_error:
        return out
    coarse = _backend.odd_difference_sum(vc, *_pv_rule(n, 2, backend), backend=backend)
    return out, np.abs(fine - coarse) / 3


def conjugate_identity_check(fn, radii=(0.3, 0.6, 0.9), n_angles=64):
    """Max deviation between P[H(chi)] and the harmonic conjugate of P[chi] on a grid.

    The left side uses the PV quadrature and the direct Poisson rule; the right
    side uses the analytic pair of the spectral extension.
    """
    v = _values(fn)
    phi = 2 * np.pi * np.arange(n_angles) / n_angles
    z = np.multiply.outer(np.asarray(radii, dtype=float), np.exp(1j * phi)).ravel()
    lhs = poisson_quadrature(hilbert_pv(v).astype(complex), z)
    rhs = harmonic_conjugate(analyze(v.astype(complex)), z)
    return float(np.abs(lhs - rhs).max())


@dataclass
class PrivalovReport:
    A: float
    B: float
    C: float
    passed: bool
    h: np.ndarray = field(repr=False)
    lhs: np.ndarray = field(repr=False)
    terms: np.ndarray = field(repr=False)

    @property
    def rhs(self):
        return self.terms @ np.array([self.A, self.B, self.C])


def privalov_report(fn_derivative, omega, method="spectral", tol=1e-9):
    """Fit the smallest constants with |H(x+h) - H(x)| <= A I1(h) + B h I2(h) + C omega(h).

    I1(h) is the integral of omega(t)/t over (0, 2h] and I2(h) that of omega(t)/t^2
    over [h, 2pi]. The left side is maximized over the grid for dyadic h; the
    constants minimize the summed right side subject to the bound at every h.
    """
    v = _values(fn_derivative)
    n = v.size
    step = 2 * np.pi / n
    emp = modulus_of_continuity(v.astype(complex), step, periodic=True)
    lags = emp.t[emp.t <= np.pi]
    if np.any(emp(lags) > omega(lags) * (1 + tol) + tol):
        raise PreconditionError("samples violate the supplied modulus of continuity")
    H = hilbert_spectral(v) if method == "spectral" else hilbert_pv(v)
    shifts = [1 << j for j in range(int(np.log2(n)) - 1) if (1 << j) * step <= np.pi / 2]
    h = np.array(shifts, dtype=float) * step
    lhs = np.array([np.abs(np.roll(H, -m) - H).max() for m in shifts])
    terms = np.array([[dini_integral(omega, 2 * hh).value,
                       hh * omega.inverse_t2_integral(hh, 2 * np.pi),
                       float(omega(hh))] for hh in h])
    scale = max(np.abs(v).max(), 1e-300)
    if np.all(lhs <= 1e-12 * scale):
        return PrivalovReport(0.0, 0.0, 0.0, True, h, lhs, terms)
    res = linprog(terms.sum(axis=0), A_ub=-terms, b_ub=-lhs, bounds=[(0, None)] * 3, method="highs")
    if not res.success:
        return PrivalovReport(np.inf, np.inf, np.inf, False, h, lhs, terms)
    A, B, C = (float(x) for x in res.x)
    return PrivalovReport(A, B, C, bool(np.all(np.isfinite(res.x))), h, lhs, terms)
