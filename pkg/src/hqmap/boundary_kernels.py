"""Boundary kernels of a harmonic map onto a Jordan domain and the boundary Jacobian.

For a curve g parametrized by arclength,

    K(s, t) = Re[conj(g(t) - g(s)) * i g'(s)],

and for a boundary map Psi(t) = F(e^{it}),

    K_F(t, tau) = Re[conj(Psi(t) - Psi(tau)) * i Psi'(tau)] = psi'(tau) K(psi(t), psi(tau)).

The boundary Jacobian of the harmonic extension is the singular average
J(tau) = (1/2pi) int K_F(tau + x, tau) / (2 sin^2(x/2)) dx.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _backend
from .curves import arc_distance
from .errors import InputError, PreconditionError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass
class KernelEvaluation:
    pairs: np.ndarray
    value: np.ndarray
    bound: np.ndarray
    weight: np.ndarray


@dataclass
class KernelBoundReport:
    passed: bool
    max_excess: float
    n_pairs: int
    worst_pair: tuple
    arc: KernelEvaluation
    pullback: KernelEvaluation = None

    def to_dict(self):
        out = {"passed": self.passed, "max_excess": self.max_excess, "n_pairs": self.n_pairs,
               "worst_pair": [float(x) for x in self.worst_pair]}
        if self.pullback is not None:
            out["pullback_max_excess"] = float(np.max(self.pullback.value - self.pullback.bound))
        return out


def kernel_K(curve, s, t):
    """Re[conj(g(t) - g(s)) i g'(s)] at arclengths s, t (broadcast)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.real(np.conj(curve.point(t) - curve.point(s)) * 1j * curve.tangent(s))


def kernel_KF(boundary, t, tau):
    """Re[conj(Psi(t) - Psi(tau)) i Psi'(tau)] from the trigonometric interpolant."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    t, tau = np.broadcast_arrays(t, tau)
    pt = boundary.value_at(t.ravel()).reshape(t.shape)
    ptau = boundary.value_at(tau.ravel()).reshape(t.shape)
    dtau = boundary.derivative_at(tau.ravel()).reshape(t.shape)
    return np.real(np.conj(pt - ptau) * 1j * dtau)


def kernel_KF_via_curve(boundary, t, tau):
    """The same kernel routed through the curve: psi'(tau) K(psi(t), psi(tau))."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    t, tau = np.broadcast_arrays(t, tau)
    speed = np.abs(boundary.derivative_at(tau.ravel())).reshape(t.shape)
    return speed * kernel_K(boundary.target, boundary.psi_at(tau), boundary.psi_at(t))


def _default_pairs(curve, count=64):
    s = curve.length * np.arange(count) / count
    a, b = np.meshgrid(s, s, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def kernel_bound_check(curve, omega=None, pairs=None, boundary=None, slack=1e-9):
    """Check |K(s,t)| <= int_0^{d(s,t)} omega over a set of arclength pairs.

    With ``boundary`` the pulled-back form |K_F(t,tau)| <= psi'(tau) int_0^{d} omega,
    d the arc distance between psi(t) and psi(tau), is checked too on a grid of
    angle pairs. Violations are reported, not raised.
    """
    omega = curve.modulus() if omega is None else omega
    pairs = _default_pairs(curve) if pairs is None else np.atleast_2d(np.asarray(pairs, dtype=float))
    s, t = pairs[:, 0], pairs[:, 1]
    d = arc_distance(curve, s, t)
    val = np.abs(kernel_K(curve, s, t))
    bnd = omega.cumulative(d)
    arc = KernelEvaluation(pairs, val, bnd, 2 * np.sin(d / 2) ** 2)
    excess = val - bnd
    k = int(np.argmax(excess))
    worst = (float(s[k]), float(t[k]))
    max_excess = float(excess[k])
    pull = None
    if boundary is not None:
        ang = 2 * np.pi * np.arange(64) / 64
        tt, tau = (x.ravel() for x in np.meshgrid(ang, ang, indexing="ij"))
        l = curve.length
        dpsi = np.mod(boundary.psi_at(tt) - boundary.psi_at(tau), l)
        dg = np.minimum(dpsi, l - dpsi)
        pv = np.abs(kernel_KF(boundary, tt, tau))
        pb = np.abs(boundary.derivative_at(tau)) * omega.cumulative(dg)
        pull = KernelEvaluation(np.column_stack([tt, tau]), pv, pb, 2 * np.sin((tt - tau) / 2) ** 2)
        pe = pv - pb
        if pe.max() > max_excess:
            k = int(np.argmax(pe))
            max_excess, worst = float(pe[k]), (float(tt[k]), float(tau[k]))
    return KernelBoundReport(max_excess <= slack, max_excess, len(s), worst, arc, pull)


@dataclass
class JacobianResult:
    tau: np.ndarray
    J: np.ndarray
    remainder: np.ndarray = field(repr=False)

    @property
    def max_remainder(self):
        return float(np.max(self.remainder))


def _shifted(boundary, delta):
    """Values and derivative of the interpolant on the grid shifted by ``delta``."""
    n = boundary.N
    k = np.fft.fftfreq(n, 1.0 / n)
    c = boundary.spectrum.copy()
    ph = np.exp(1j * k * delta)
    ph[n // 2] = 1.0
    cd = c * ph * 1j * k
    c = c * ph
    nyq = boundary.spectrum[n // 2]
    # the split Nyquist mode becomes cos/sin of the shift on the grid
    c[n // 2] = nyq * np.cos(n * delta / 2)
    cd[n // 2] = -nyq * (n / 2) * np.sin(n * delta / 2)
    return np.fft.ifft(c) * n, np.fft.ifft(cd) * n


def _jacobian_rule(n):
    h = 2 * np.pi / n
    pos = np.arange(1, n // 2, 2)
    offsets = np.concatenate((-pos[::-1], pos))
    x = offsets * h
    weights = (2 * h) / (2 * np.sin(x / 2) ** 2) / (2 * np.pi)
    return offsets, weights


def _window_remainder(speed, lip, omega, h, length):
    """Bound on the two innermost panels |x| < 2h from |K_F| <= psi' int_0^{lip|x|} omega."""
    def envelope(x):
        return float(omega.cumulative(min(lip * x, length / 2))) / (2 * np.sin(x / 2) ** 2)

    exact, _ = integrate.quad(envelope, 0.0, 2 * h, epsabs=0.0, epsrel=1e-8, limit=100)
    quad_part = 2 * h * envelope(h)
    return speed * 2 * (exact + quad_part) / (2 * np.pi)


def boundary_jacobian(boundary, tau=None, omega=None, backend=None):
    """J_f(e^{i tau}) by the midpoint rule at odd offsets of the grid step.

    ``tau=None`` sweeps every grid angle. Off-grid angles are handled by an exact
    spectral shift of the samples. The remainder is a bound on the contribution of
    the two panels adjacent to the singularity.
    """
    speed_all = np.abs(boundary.derivative)
    if not np.all(np.isfinite(boundary.derivative)) or not np.all(np.isfinite(boundary.values)):
        raise PreconditionError("boundary map is not Lipschitz (non-finite derivative)")
    n = boundary.N
    if n < 64:
        raise InputError("boundary Jacobian needs N >= 64")
    omega = boundary.target.modulus() if omega is None else omega
    lip = float(speed_all.max())
    h = 2 * np.pi / n
    offsets, weights = _jacobian_rule(n)
    l = boundary.target.length
    if tau is None:
        J = _backend.jacobian_sum(boundary.values, boundary.derivative, offsets, weights, backend=backend)
        base = _window_remainder(1.0, lip, omega, h, l)
        return JacobianResult(boundary.angles, J, base * speed_all)
    scalar = np.ndim(tau) == 0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    J = np.empty(taus.size)
    rem = np.empty(taus.size)
    base = _window_remainder(1.0, lip, omega, h, l)
    for i, tv in enumerate(taus):
        v, d = _shifted(boundary, tv)
        J[i] = np.sum(weights * np.real(np.conj(v[offsets % n] - v[0]) * 1j * d[0]))
        rem[i] = base * abs(d[0])
    if scalar:
        return JacobianResult(taus[0], float(J[0]), float(rem[0]))
    return JacobianResult(taus, J, rem)


@dataclass
class JacobianBound:
    phi: np.ndarray
    bound: np.ndarray
    jacobian: np.ndarray
    ratio: np.ndarray

    @property
    def holds(self):
        return bool(np.all(self.jacobian <= self.bound * (1 + 1e-9) + 1e-12))


def _bound_nodes(levels=30):
    """Gauss nodes on dyadic panels of (0, pi] and a final panel (0, pi 2^-levels]."""
    xs, ws = [], []
    hi = np.pi
    for _ in range(levels):
        lo = 0.5 * hi
        xs.append(0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * _GL_W)
        hi = lo
    return np.concatenate(xs), np.concatenate(ws), hi


def jacobian_upper_bound(boundary, omega=None, phi=None, jacobian=None):
    """(pi/4) |Psi'(phi)| int_{-pi}^{pi} x^-2 int_0^{rho(x,phi)} omega dx.

    rho is the arc distance on the target between the images of e^{i(phi+x)} and
    e^{i phi}, read off the correspondence. The innermost stretch below the last
    dyadic panel uses rho ~ psi'(phi)|x|.
    """
    omega = boundary.target.modulus() if omega is None else omega
    l = boundary.target.length
    grid = phi is None
    phi = boundary.angles if grid else np.atleast_1d(np.asarray(phi, dtype=float))
    x, w, tiny = _bound_nodes()
    speed = np.abs(boundary.derivative) if grid else np.abs(boundary.derivative_at(phi))
    base = boundary.psi_table_at(phi)
    total = np.zeros(phi.size)
    for sign in (1.0, -1.0):
        for i in range(0, phi.size, 64):
            blk = slice(i, i + 64)
            dpsi = np.abs(boundary.psi_table_at(phi[blk, None] + sign * x[None, :]) - base[blk, None])
            rho = np.minimum(np.mod(dpsi, l), l - np.mod(dpsi, l))
            total[blk] += (omega.cumulative(rho) / x ** 2) @ w
    xt = 0.5 * tiny * (_GL_X + 1)
    wt = 0.5 * tiny * _GL_W
    lin = omega.cumulative(np.multiply.outer(speed, xt)) / xt ** 2
    total += 2 * lin @ wt
    bound = (np.pi / 4) * speed * total
    if jacobian is None:
        jacobian = boundary_jacobian(boundary, None if grid else phi, omega).J
    jac = np.atleast_1d(np.asarray(jacobian, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, jac / bound, np.where(np.abs(jac) > 0, np.inf, 0.0))
    return JacobianBound(phi, bound, jac, ratio)
