"""Jordan curves in arc-length parametrization and their regularity data."""

from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _backend
from .errors import DegenerateCurveError, InputError, InvalidCurveError
from .modulus import ModulusOfContinuity, modulus_of_continuity


class FourierParam:
    """A closed curve ``theta -> sum_n c_n exp(i n theta)`` on [0, 2pi)."""

    def __init__(self, coeffs):
        items = sorted((int(n), complex(c)) for n, c in dict(coeffs).items() if c != 0)
        if not items:
            raise InputError("curve has no non-zero Fourier coefficients")
        self.freqs = np.array([n for n, _ in items], dtype=float)
        self.coefs = np.array([c for _, c in items], dtype=complex)

    @property
    def degree(self):
        return int(np.abs(self.freqs).max())

    def _basis(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.freqs))

    def __call__(self, theta):
        return self._basis(theta) @ self.coefs

    def derivative(self, theta, order=1):
        return self._basis(theta) @ (self.coefs * (1j * self.freqs) ** order)

    def reversed(self):
        return FourierParam({-int(n): c for n, c in zip(self.freqs, self.coefs)})

    def area(self):
        """Signed enclosed area, pi * sum n |c_n|^2."""
        return float(np.pi * np.sum(self.freqs * np.abs(self.coefs) ** 2))


class _ArcLengthMap:
    """Spectral arclength s(theta) of a FourierParam and its inverse."""

    def __init__(self, param, min_points):
        k = 1 << int(np.ceil(np.log2(max(min_points, 32 * param.degree, 1024))))
        while True:
            theta = 2 * np.pi * np.arange(k) / k
            speed = np.abs(param.derivative(theta))
            spec = np.fft.fft(speed) / k
            tail = np.abs(spec[k // 4: 3 * k // 4]).max()
            if tail <= 1e-14 * spec[0].real or k >= 1 << 20:
                break
            k *= 2
        self.resolution = k
        self.mean_speed = spec[0].real
        self.length = 2 * np.pi * self.mean_speed
        n = np.fft.fftfreq(k, 1.0 / k)
        coef = np.zeros(k, dtype=complex)
        coef[n != 0] = spec[n != 0] / (1j * n[n != 0])
        # drop the smallest modes while their total stays below roundoff of s
        order = np.argsort(np.abs(coef))
        dropped = np.cumsum(np.abs(coef[order]))
        keep = np.ones(k, dtype=bool)
        keep[order[dropped <= 1e-16 * self.length]] = False
        keep &= n != 0
        self._n = n[keep].astype(int)
        self._c = coef[keep]
        self._top = int(np.abs(self._n).max()) if self._n.size else 0
        pos = self._n > 0
        self._cpos = np.zeros(self._top + 1, dtype=complex)
        self._cneg = np.zeros(self._top + 1, dtype=complex)
        self._cpos[self._n[pos]] = self._c[pos]
        self._cneg[-self._n[~pos]] = self._c[~pos]
        self._param = param
        # dense table from the full spectrum, then a monotone inverse
        anti = np.zeros(k, dtype=complex)
        anti[n != 0] = spec[n != 0] / (1j * n[n != 0])
        periodic = np.fft.ifft(anti * k).real
        s_dense = self.mean_speed * theta + periodic - periodic[0]
        s_dense = np.append(s_dense, self.length)
        t_dense = np.append(theta, 2 * np.pi)
        if np.any(np.diff(s_dense) <= 0):
            # zero speed somewhere: keep strict monotonicity for the inverse
            s_dense = np.maximum.accumulate(s_dense + 1e-15 * np.arange(s_dense.size))
        self._inv = PchipInterpolator(s_dense, t_dense)

    def s_of_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        turns = np.floor(theta / (2 * np.pi))
        th = theta - 2 * np.pi * turns
        out = np.empty(th.shape)
        flat, res = th.ravel(), out.ravel()
        if self._top == 0:
            return self.mean_speed * th + self.length * turns
        for i in range(0, flat.size, 4096):
            z = np.exp(1j * flat[i:i + 4096])
            # powers z^1..z^top by cumulative product; negative modes via conjugates
            zp = np.cumprod(np.broadcast_to(z[:, None], (z.size, self._top)), axis=1)
            zp = np.concatenate((np.ones((z.size, 1)), zp), axis=1) - 1.0
            osc = zp @ self._cpos + np.conj(zp) @ self._cneg
            res[i:i + 4096] = self.mean_speed * flat[i:i + 4096] + osc.real
        return out + self.length * turns

    def theta_of_s(self, s):
        s = np.asarray(s, dtype=float)
        turns = np.floor(s / self.length)
        ss = s - self.length * turns
        th = self._inv(ss)
        for _ in range(2):
            sp = np.abs(self._param.derivative(th))
            ok = sp > 1e-8 * self.mean_speed
            th = np.where(ok, th - (self.s_of_theta(th) - ss) / np.where(ok, sp, 1.0), th)
        return th + 2 * np.pi * turns


class JordanCurve:
    """Uniform arc-length samples of a positively oriented closed curve.

    ``samples[i] = g(s_i)`` and ``tangents[i] = g'(s_i)`` at ``s_i = length*i/M``.
    Analytic curves keep their parametrization so ``point``/``tangent`` are exact
    at any arclength; sampled polylines interpolate linearly (which is exact for
    the polyline itself).
    """

    def __init__(self, samples, tangents, length, enclosed_area, param=None, arcmap=None,
                 polyline=None, analytic_modulus=None, spec=None):
        self.samples = np.asarray(samples, dtype=complex)
        self.tangents = np.asarray(tangents, dtype=complex)
        self.length = float(length)
        self.enclosed_area = float(enclosed_area)
        self._param = param
        self._arcmap = arcmap
        self._polyline = polyline
        self.analytic_modulus = analytic_modulus
        self.spec = spec
        self.samples.setflags(write=False)
        self.tangents.setflags(write=False)

    @property
    def M(self):
        return self.samples.size

    @property
    def spacing(self):
        return self.length / self.M

    @property
    def arclengths(self):
        return self.spacing * np.arange(self.M)

    @property
    def is_analytic(self):
        return self._param is not None

    def point(self, s):
        """g(s) for arbitrary (periodically extended) arclength s."""
        s = np.asarray(s, dtype=float)
        if self._param is not None:
            return self._param(self._arcmap.theta_of_s(s))
        verts, cum = self._polyline
        ss = np.mod(s, self.length)
        return np.interp(ss, cum, verts.real) + 1j * np.interp(ss, cum, verts.imag)

    def tangent(self, s):
        """g'(s), a unit complex number."""
        s = np.asarray(s, dtype=float)
        if self._param is not None:
            d = self._param.derivative(self._arcmap.theta_of_s(s))
            return d / np.abs(d)
        verts, cum = self._polyline
        edges = np.diff(verts)
        dirs = edges / np.abs(edges)
        j = np.clip(np.searchsorted(cum, np.mod(s, self.length), side="right") - 1, 0, dirs.size - 1)
        return dirs[j]

    def project(self, w):
        """Arclength of the point of the curve nearest to ``w`` (vectorized)."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        j = np.argmin(np.abs(self.samples[None, :] - w[:, None]), axis=1)
        s = self.arclengths[j]
        for _ in range(8):
            g, t = self.point(s), self.tangent(s)
            step = np.real(np.conj(w - g) * t)
            s = s + np.clip(step, -self.spacing, self.spacing)
        return np.mod(s, self.length)

    def param_to_arclength(self, theta):
        """Arclength s(theta) of the native parametrization (analytic curves only)."""
        if self._arcmap is None:
            raise InputError("curve has no native parametrization")
        return self._arcmap.s_of_theta(theta)

    def native_point(self, theta):
        return self._param(theta)

    def native_derivative(self, theta, order=1):
        return self._param.derivative(theta, order)

    @cached_property
    def chord_arc(self):
        return chord_arc_constant(self)

    def tangent_modulus(self, t_grid=None, backend=None):
        """Empirical modulus of continuity of g' from the samples."""
        return modulus_of_continuity(self.tangents, self.spacing, t_grid=t_grid, periodic=True,
                                     length=self.length, backend=backend)

    def modulus(self):
        """The closed-form modulus when one is known, else the empirical one."""
        if self.analytic_modulus is not None:
            return self.analytic_modulus
        return self.tangent_modulus()

    def is_convex(self, tol=1e-12):
        """Sign-constancy of cross products of consecutive edge vectors."""
        e = np.diff(np.append(self.samples, self.samples[0]))
        cross = np.imag(np.conj(e) * np.roll(e, -1))
        scale = np.abs(e) * np.abs(np.roll(e, -1))
        return bool(np.all(cross >= -tol * scale.max()))

    def dist_to(self, w):
        """Euclidean distance from ``w`` to the curve."""
        s = self.project(w)
        return float(np.abs(self.point(s)[0] - w))


def arc_distance(curve, s1, s2):
    """Shorter arclength between g(s1) and g(s2): min(|s1-s2|, l-|s1-s2|)."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    l = curve.length if isinstance(curve, JordanCurve) else float(curve)
    eps = 1e-12 * l
    if np.any(s1 < -eps) or np.any(s2 < -eps) or np.any(s1 > l + eps) or np.any(s2 > l + eps):
        raise InputError("arclength out of range [0, l]")
    d = np.abs(s1 - s2)
    out = np.minimum(d, l - d)
    return float(out) if out.ndim == 0 else out


def chord_arc_details(curve, backend=None):
    """(B, i, j, min_chord): max arc/chord ratio over sampled pairs and where it occurs."""
    if curve.M < 16:
        raise InputError("chord-arc scan needs at least 16 samples")
    ratio, argi, chord = _backend.chord_arc_lags(curve.samples, backend=backend)
    m = np.arange(1, curve.M // 2 + 1)
    floor = 1e-12 * curve.length
    if chord.min() < floor:
        raise DegenerateCurveError("distinct samples nearly coincide (self-touching curve)")
    r = curve.spacing * m * ratio
    k = int(np.argmax(r))
    i = int(argi[k])
    return max(float(r[k]), 1.0), i, (i + int(m[k])) % curve.M, float(chord.min())


def chord_arc_constant(curve, backend=None):
    """Chord-arc constant B: max d_gamma/|z1-z2| over distinct sample pairs."""
    return chord_arc_details(curve, backend)[0]


# -- construction ----------------------------------------------------------

def circle_modulus(r):
    """Exact modulus of the tangent of a circle of radius r: 2 sin(min(t, pi r)/(2r))."""
    r = float(r)

    def func(t):
        return 2 * np.sin(np.minimum(t, np.pi * r) / (2 * r))

    def primitive(d):
        d = np.asarray(d, dtype=float)
        # 4r(1 - cos(d/2r)) written without cancellation at small d
        head = 8 * r * np.sin(np.minimum(d, np.pi * r) / (4 * r)) ** 2
        return head + 2 * np.maximum(d - np.pi * r, 0.0)

    return ModulusOfContinuity.closed_form(func, 2 * np.pi * r, primitive, name=f"circle(r={r:g})")


def _check_simple(points):
    from shapely.geometry import LinearRing

    if not LinearRing(np.column_stack([points.real, points.imag])).is_simple:
        raise InvalidCurveError("curve self-intersects")


def _parse_coeffs(raw):
    coeffs = {}
    entries = list(raw)
    if entries and all(len(e) == 2 for e in entries):
        for n, (re, im) in enumerate(entries):
            coeffs[n] = coeffs.get(n, 0) + complex(re, im)
    else:
        for e in entries:
            if len(e) != 3:
                raise InputError("fourier coefficients must be [re,im] pairs or [n,re,im] triples")
            n, re, im = e
            if int(n) != n:
                raise InputError("frequency must be an integer")
            coeffs[int(n)] = coeffs.get(int(n), 0) + complex(re, im)
    return coeffs


def curve_param_from_spec(spec):
    """FourierParam for an analytic curve spec, or None for sampled curves."""
    kind = spec.get("type")
    if kind == "circle":
        r = float(spec.get("r", 1.0))
        if r <= 0:
            raise InputError("circle radius must be positive")
        return FourierParam({1: r})
    if kind == "ellipse":
        a, b = float(spec["a"]), float(spec["b"])
        if a <= 0 or b <= 0:
            raise InputError("ellipse semi-axes must be positive")
        return FourierParam({1: (a + b) / 2, -1: (a - b) / 2})
    if kind == "fourier":
        return FourierParam(_parse_coeffs(spec["coeffs"]))
    if kind == "samples":
        return None
    raise InputError(f"unknown curve spec type {kind!r}")


def arc_length_reparametrize(curve, M=1024):
    """Build a JordanCurve with M uniform arc-length samples.

    ``curve`` is a curve spec dict (circle / ellipse / fourier / samples), a
    :class:`FourierParam`, or an (n,) complex / (n, 2) real array of polyline
    vertices.
    """
    M = int(M)
    if M < 16:
        raise InputError("need M >= 16 samples")
    spec = curve if isinstance(curve, dict) else None
    if isinstance(curve, FourierParam):
        param = curve
    elif spec is not None:
        param = curve_param_from_spec(spec)
        if param is None:
            return _polyline_curve(spec["points"], M, spec)
    else:
        return _polyline_curve(curve, M, None)

    if param.area() < 0:
        param = param.reversed()
    if param.area() <= 0:
        raise InvalidCurveError("curve encloses no area")
    arcmap = _ArcLengthMap(param, 8 * M)
    s = arcmap.length * np.arange(M) / M
    theta = arcmap.theta_of_s(s)
    pts = param(theta)
    d = param.derivative(theta)
    if np.any(np.abs(d) < 1e-12 * arcmap.mean_speed):
        raise InvalidCurveError("parametrization has vanishing speed at a sample")
    dense = param(2 * np.pi * np.arange(max(4 * M, 4096)) / max(4 * M, 4096))
    _check_simple(dense)
    modulus = None
    if spec is not None and spec.get("type") == "circle":
        modulus = circle_modulus(spec.get("r", 1.0))
    if spec is not None and "omega" in spec:
        modulus = _spec_modulus(spec["omega"], arcmap.length)
    return JordanCurve(pts, d / np.abs(d), arcmap.length, param.area(), param=param, arcmap=arcmap,
                       analytic_modulus=modulus, spec=spec)


def _polyline_curve(points, M, spec):
    p = np.asarray(points)
    if p.ndim == 2 and p.shape[1] == 2:
        p = p[:, 0] + 1j * p[:, 1]
    p = np.asarray(p, dtype=complex).ravel()
    if p.size > 1 and p[0] == p[-1]:
        p = p[:-1]
    keep = np.append(True, np.abs(np.diff(p)) > 0)
    p = p[keep]
    if np.unique(np.round(p, 14)).size < 3:
        raise InputError("need at least 3 distinct points")
    _check_simple(p)
    area = 0.5 * np.sum(np.imag(np.conj(p) * np.roll(p, -1)))
    if area < 0:
        p = p[::-1]
        area = -area
    verts = np.append(p, p[0])
    cum = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(verts)))))
    length = cum[-1]
    curve = JordanCurve(np.zeros(M, complex), np.ones(M, complex), length, area,
                        polyline=(verts, cum), spec=spec)
    s = length * np.arange(M) / M
    return JordanCurve(curve.point(s), curve.tangent(s), length, area, polyline=(verts, cum), spec=spec)


def _spec_modulus(raw, length):
    """A user-declared modulus ``{"kind": "power", "c": c, "a": a}`` for the tangent."""
    if not isinstance(raw, dict) or raw.get("kind", "power") != "power":
        raise InputError("only power-law moduli can be declared in a curve spec")
    try:
        return ModulusOfContinuity.power(float(raw["c"]), float(raw.get("a", 1.0)), length)
    except KeyError as exc:
        raise InputError("power modulus needs 'c'") from exc


def curve_from_spec(spec, M=1024):
    return arc_length_reparametrize(spec, M)
