"""Boundary correspondences and their harmonic extensions to the unit disk.

The extension ``f = P[F]`` is stored as an analytic pair ``f = g + conj(h)`` read
straight off the discrete Fourier coefficients of the boundary samples. A direct
Poisson-kernel quadrature is kept as an independent cross-check.
"""

import warnings

import numpy as np

from .curves import (FourierParam, _spec_modulus, arc_length_reparametrize, circle_modulus,
                     curve_param_from_spec)
from .errors import DomainError, InputError, PrecisionWarning


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def _spectral_derivative(values):
    n = values.size
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(values) * 1j * k)


class BoundaryMap:
    """Samples of ``Psi(t) = F(e^{it})`` on ``t_j = 2 pi j / N`` plus the arclength map.

    ``correspondence[j] = psi(t_j)`` is unwrapped: it starts in [0, l) and is
    nondecreasing over the period, so ``g(psi(t)) = Psi(t)``.
    """

    def __init__(self, values, derivative, target, correspondence, psi_fn=None, spec=None):
        self.values = np.asarray(values, dtype=complex)
        self.derivative = np.asarray(derivative, dtype=complex)
        self.target = target
        self.correspondence = np.asarray(correspondence, dtype=float)
        self._psi_fn = psi_fn
        self.spec = spec
        self.spectrum = np.fft.fft(self.values) / self.values.size
        steps = np.diff(np.append(self.correspondence, self.correspondence[0] + target.length))
        if np.any(steps < -1e-9 * target.length):
            raise InputError("boundary correspondence is not orientation preserving")

    @property
    def N(self):
        return self.values.size

    @property
    def angles(self):
        return 2 * np.pi * np.arange(self.N) / self.N

    @property
    def speed(self):
        """psi'(t_j) = |Psi'(t_j)|."""
        return np.abs(self.derivative)

    @property
    def lipschitz(self):
        return float(self.speed.max())

    def _trig(self, t, order=0):
        n = self.N
        # Nyquist mode split evenly between +N/2 and -N/2
        k = np.append(np.fft.fftfreq(n, 1.0 / n), n // 2)
        c = np.append(self.spectrum, 0.5 * self.spectrum[n // 2])
        c[n // 2] *= 0.5
        basis = np.exp(1j * np.multiply.outer(np.asarray(t, dtype=float), k))
        return basis @ (c * (1j * k) ** order)

    def value_at(self, t):
        """Trigonometric interpolant of the samples."""
        return self._trig(t)

    def derivative_at(self, t):
        return self._trig(t, 1)

    def psi_at(self, t):
        """Arclength correspondence psi(t), continued so psi(t + 2pi) = psi(t) + l."""
        t = np.asarray(t, dtype=float)
        if self._psi_fn is not None:
            return self._psi_fn(t)
        l = self.target.length
        periodic = self.correspondence - l * self.angles / (2 * np.pi)
        spec = np.fft.fft(periodic) / self.N
        k = np.fft.fftfreq(self.N, 1.0 / self.N)
        k[self.N // 2] = 0.0
        return l * t / (2 * np.pi) + (np.exp(1j * np.multiply.outer(t, k)) @ spec).real

    def psi_table_at(self, t):
        """Linear interpolation of the correspondence table, continued quasi-periodically."""
        t = np.asarray(t, dtype=float)
        if self._psi_fn is not None:
            return self._psi_fn(t)
        l = self.target.length
        turns = np.floor(t / (2 * np.pi))
        knots = np.append(self.angles, 2 * np.pi)
        table = np.append(self.correspondence, self.correspondence[0] + l)
        return np.interp(t - 2 * np.pi * turns, knots, table) + l * turns

    def projection_error(self):
        """Largest |g(psi(t_j)) - Psi(t_j)| over the samples."""
        return float(np.abs(self.target.point(self.correspondence) - self.values).max())

    def resampled(self, values, derivative, correspondence, psi_fn=None):
        return BoundaryMap(values, derivative, self.target, correspondence, psi_fn, self.spec)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_trig(cls, coeffs, N=1024, M=1024, spec=None):
        """Psi(t) = sum_n c_n e^{int}; the target is the image curve itself."""
        param = FourierParam(coeffs)
        return cls._from_param(param, N, M, spec)

    @classmethod
    def _from_param(cls, param, N, M, spec, modulus=None):
        if param.area() <= 0:
            raise InputError("boundary map is not orientation preserving (negative winding)")
        target = arc_length_reparametrize(param, M)
        if modulus is not None:
            target.analytic_modulus = modulus
        t = 2 * np.pi * np.arange(N) / N
        return cls(param(t), param.derivative(t), target, target.param_to_arclength(t),
                   psi_fn=target.param_to_arclength, spec=spec)

    @classmethod
    def from_curve(cls, curve_spec, correspondence="identity", N=1024, M=1024, spec=None):
        """Boundary map onto a curve spec.

        ``identity`` uses the curve's native parameter as the angle; ``sampled``
        (alias ``arclength``) uses the uniform arclength correspondence.
        """
        if correspondence == "identity":
            param = curve_param_from_spec(curve_spec)
            if param is None:
                correspondence = "sampled"
            else:
                if param.area() < 0:
                    param = param.reversed()
                bm = cls._from_param(param, N, M, spec)
                if curve_spec.get("type") == "circle":
                    bm.target.analytic_modulus = circle_modulus(curve_spec.get("r", 1.0))
                if "omega" in curve_spec:
                    bm.target.analytic_modulus = _spec_modulus(curve_spec["omega"], bm.target.length)
                return bm
        if correspondence not in ("sampled", "arclength"):
            raise InputError(f"unknown correspondence {correspondence!r}")
        target = arc_length_reparametrize(curve_spec, M)
        l = target.length
        t = 2 * np.pi * np.arange(N) / N
        s = l * t / (2 * np.pi)
        return cls(target.point(s), target.tangent(s) * l / (2 * np.pi), target, s,
                   psi_fn=lambda tt: l * np.asarray(tt) / (2 * np.pi), spec=spec)

    @classmethod
    def from_samples(cls, values, curve_spec=None, M=1024, spec=None):
        """Boundary samples; the target is ``curve_spec`` or the trigonometric interpolant."""
        v = np.asarray(values)
        if v.ndim == 2 and v.shape[1] == 2:
            v = v[:, 0] + 1j * v[:, 1]
        v = np.asarray(v, dtype=complex).ravel()
        n = v.size
        if not _is_pow2(n):
            raise InputError("number of boundary samples must be a power of two")
        if curve_spec is None:
            c = np.fft.fft(v) / n
            k = np.fft.fftfreq(n, 1.0 / n).astype(int)
            scale = np.abs(c).max()
            coeffs = {int(kk): cc for kk, cc in zip(k, c) if abs(cc) > 1e-15 * scale}
            if n // 2 in coeffs or -(n // 2) in coeffs:
                half = coeffs.pop(-(n // 2), 0) + coeffs.pop(n // 2, 0)
                coeffs[n // 2] = half / 2
                coeffs[-(n // 2)] = half / 2
            param = FourierParam(coeffs)
            bm = cls._from_param(param, n, M, spec)
            return cls(v, _spectral_derivative(v), bm.target, bm.correspondence, bm._psi_fn, spec)
        target = arc_length_reparametrize(curve_spec, M)
        s = target.project(v)
        l = target.length
        # unwrap relative to the first sample
        steps = np.mod(np.diff(s), l)
        steps[steps > l - 1e-9 * l] -= l
        psi = np.concatenate(([s[0]], s[0] + np.cumsum(steps)))
        bm = cls(v, _spectral_derivative(v), target, psi, spec=spec)
        if curve_spec.get("type") == "circle":
            target.analytic_modulus = circle_modulus(curve_spec.get("r", 1.0))
        return bm


def boundary_from_spec(spec, N=1024, M=1024):
    """Boundary map from a JSON-style spec dict (trig / samples / composed)."""
    kind = spec.get("type")
    if kind == "trig":
        coeffs = {}
        for entry in spec["coeffs"]:
            if len(entry) != 3:
                raise InputError("trig coefficients are [n, re, im] triples")
            n, re, im = entry
            coeffs[int(n)] = coeffs.get(int(n), 0) + complex(re, im)
        return BoundaryMap.from_trig(coeffs, N=N, M=M, spec=spec)
    if kind == "samples":
        return BoundaryMap.from_samples(spec["values"], spec.get("curve"), M=M, spec=spec)
    if kind == "composed":
        return BoundaryMap.from_curve(spec["curve"], spec.get("correspondence", "identity"), N=N, M=M,
                                      spec=spec)
    if kind in ("circle", "ellipse", "fourier"):
        return BoundaryMap.from_curve(spec, "identity", N=N, M=M, spec=spec)
    raise InputError(f"unknown boundary map spec type {kind!r}")


class HarmonicMap:
    """``f = g + conj(h)`` with ``g = sum a_n z^n`` (n=0..N/2), ``h = sum b_n z^n`` (n=1..N/2)."""

    def __init__(self, analytic_part, coanalytic_part, boundary=None):
        self.analytic_part = np.asarray(analytic_part, dtype=complex)
        self.coanalytic_part = np.asarray(coanalytic_part, dtype=complex)
        self.boundary = boundary
        n = self.analytic_part.size
        self._a = self.analytic_part
        self._b = np.concatenate(([0.0], self.coanalytic_part))
        k = np.arange(n)
        self._da = (k[1:] * self._a[1:])
        kb = np.arange(self._b.size)
        self._db = (kb[1:] * self._b[1:])

    @property
    def tail_energy(self):
        """Relative coefficient energy at |n| >= N/4 (aliasing indicator)."""
        a, b = np.abs(self._a) ** 2, np.abs(self._b) ** 2
        cut = (self._a.size - 1) // 2
        total = a.sum() + b.sum()
        return float((a[cut:].sum() + b[cut:].sum()) / total) if total > 0 else 0.0

    @property
    def resolved(self):
        return self.tail_energy < 1e-12

    def g(self, z):
        return np.polynomial.polynomial.polyval(z, self._a)

    def h(self, z):
        return np.polynomial.polynomial.polyval(z, self._b)

    def dg(self, z):
        return np.polynomial.polynomial.polyval(z, self._da)

    def dh(self, z):
        return np.polynomial.polynomial.polyval(z, self._db)

    def boundary_derivative(self, t):
        """Tangential derivative d/dt f(e^{it}) from the coefficients."""
        z = np.exp(1j * np.asarray(t, dtype=float))
        return 1j * (z * self.dg(z) - np.conj(z * self.dh(z)))


def _samples(boundary):
    return np.asarray(getattr(boundary, "values", boundary), dtype=complex)


def analyze(boundary):
    """Split the boundary spectrum into the analytic pair of the harmonic extension.

    ``boundary`` is a :class:`BoundaryMap` or a plain array of N uniform samples.
    """
    values = _samples(boundary)
    n = values.size
    if not _is_pow2(n) or n < 64:
        raise InputError("N must be a power of two >= 64")
    c = np.fft.fft(values) / n
    half = n // 2
    a = np.empty(half + 1, dtype=complex)
    a[:half] = c[:half]
    a[half] = 0.5 * c[half]
    b = np.empty(half, dtype=complex)
    b[: half - 1] = np.conj(c[n - 1: half: -1])
    b[half - 1] = np.conj(0.5 * c[half])
    return HarmonicMap(a, b, boundary if isinstance(boundary, BoundaryMap) else None)


def _check_disk(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1 + 1e-12):
        raise DomainError("point outside the closed unit disk")
    return z


def evaluate(hmap, z, derivatives=False):
    """f(z), and optionally (f_z, f_zbar) = (g'(z), conj(h'(z)))."""
    z = _check_disk(z)
    f = hmap.g(z) + np.conj(hmap.h(z))
    if not derivatives:
        return f
    return f, hmap.dg(z), np.conj(hmap.dh(z))


def radial_tangential(hmap, z):
    """(d_r f, d_t f) at z = r e^{it}.

    d_r f = e^{it} g' + conj(e^{it} h'), d_t f = i (z g' - conj(z h')). At z = 0 the
    radial derivative is the t = 0 limit of that expression and a warning is issued.
    """
    z = _check_disk(z)
    if np.any(z == 0):
        warnings.warn("radial derivative at z=0 taken along t=0", PrecisionWarning, stacklevel=2)
    u = np.where(z == 0, 1.0, z / np.where(z == 0, 1.0, np.abs(z)))
    dg, dh = hmap.dg(z), hmap.dh(z)
    return u * dg + np.conj(u * dh), 1j * (z * dg - np.conj(z * dh))


def harmonic_conjugate(hmap, z):
    """Harmonic conjugate of f (componentwise), normalized to vanish at 0."""
    z = _check_disk(z)
    g, h = hmap.g(z), hmap.h(z)
    g0, h0 = hmap._a[0], hmap._b[0]
    return (g + h - g0 - h0).imag - 1j * (g - h - g0 + h0).real


def parseval_defect(hmap, values=None):
    """|sum |a_n|^2 + sum |b_n|^2 - mean |Psi|^2| (the Nyquist split counts half)."""
    v = _samples(hmap.boundary if values is None else values)
    c = np.fft.fft(v) / v.size
    coeff = np.sum(np.abs(hmap._a) ** 2) + np.sum(np.abs(hmap._b) ** 2) + 0.5 * abs(c[v.size // 2]) ** 2
    return float(abs(coeff - np.mean(np.abs(v) ** 2)))


def poisson_error_bound(boundary, r):
    """Aliasing bound of the N-point trapezoid Poisson rule at radius r."""
    v = _samples(boundary)
    r = np.asarray(r, dtype=float)
    l1 = np.abs(np.fft.fft(v) / v.size).sum()
    return 2 * l1 * r ** (v.size // 2) / np.maximum(1 - r, 1e-300)


def poisson_quadrature(boundary, z, tol=1e-12, return_bound=False):
    """Trapezoid rule for the Poisson integral of the boundary samples at interior z.

    Warns (:class:`PrecisionWarning`) when z is within 10/N of the circle or the
    aliasing bound exceeds ``tol``.
    """
    v = _samples(boundary)
    n = v.size
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r >= 1):
        raise DomainError("Poisson quadrature needs |z| < 1")
    bound = poisson_error_bound(v, r)
    if np.any(1 - r < 10.0 / n) or np.any(bound > tol):
        worst = float(np.max(bound))
        warnings.warn(PrecisionWarning(f"Poisson quadrature error bound {worst:.3g} exceeds {tol:g}",
                                       bound=worst), stacklevel=2)
    x = np.exp(2j * np.pi * np.arange(n) / n)
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i in range(0, flat.size, 512):
        zz = flat[i:i + 512, None]
        kern = (1 - np.abs(zz) ** 2) / np.abs(x[None, :] - zz) ** 2
        out[i:i + 512] = kern @ v / n
    out = out.reshape(z.shape)
    if return_bound:
        return out, bound
    return out
