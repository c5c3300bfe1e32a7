"""Quasiconformality diagnostics for harmonic extensions.

Everything here works on grids: rings of radii approaching the circle (plus the
circle itself for resolved maps) times uniform angles.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, PreconditionError
from .harmonic import BoundaryMap, HarmonicMap, analyze, evaluate, radial_tangential
from .hilbert import hilbert_spectral


def default_radii(levels=12):
    """1 - 2^-j for j = 1..levels."""
    return 1.0 - 2.0 ** -np.arange(1, levels + 1)


def _as_map(obj):
    if isinstance(obj, HarmonicMap):
        return obj
    if isinstance(obj, BoundaryMap):
        return analyze(obj)
    raise InputError("expected a HarmonicMap or BoundaryMap")


def _as_boundary(obj):
    if isinstance(obj, BoundaryMap):
        return obj
    if isinstance(obj, HarmonicMap) and obj.boundary is not None:
        return obj.boundary
    raise InputError("boundary correspondence not available")


def _grid(radii, angles):
    radii = default_radii() if radii is None else np.asarray(radii, dtype=float)
    if isinstance(angles, (int, np.integer)) or angles is None:
        n = 256 if angles is None else int(angles)
        angles = 2 * np.pi * np.arange(n) / n
    angles = np.asarray(angles, dtype=float)
    if np.any(radii < 0) or np.any(radii > 1):
        raise InputError("grid radii must lie in [0, 1]")
    return radii, angles


@dataclass
class DilatationReport:
    radii: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    k_sup: float
    K: float
    J_min: float
    argmax: complex
    ring_K: np.ndarray = field(repr=False)
    distortion_ok: bool
    tol: float = 1e-9

    @property
    def sense_preserving(self):
        return self.J_min > 0

    @property
    def diverging(self):
        """K keeps doubling toward the circle: ratio of the outer to the middle ring above 4."""
        finite = self.ring_K[np.isfinite(self.ring_K)]
        if finite.size < len(self.ring_K):
            return True
        if finite.size < 4:
            return False
        return bool(finite[-1] > 4 * finite[finite.size // 2])

    @property
    def is_qc(self):
        return bool(np.isfinite(self.K) and self.sense_preserving and not self.diverging)

    def validate_K(self, K):
        """True when every grid point satisfies k <= (K-1)/(K+1)."""
        return bool(self.k_sup <= (K - 1) / (K + 1) + self.tol)

    def to_dict(self):
        return {"k_sup": self.k_sup, "K": self.K if np.isfinite(self.K) else None, "J_min": self.J_min,
                "sense_preserving": self.sense_preserving, "qc": self.is_qc,
                "distortion_ok": self.distortion_ok, "argmax": [self.argmax.real, self.argmax.imag]}


def dilatation_field(hmap, radii=None, angles=None, include_boundary=None, tol=1e-9):
    """k = |f_zbar|/|f_z|, K = (1+sup k)/(1-sup k) and J = |f_z|^2 - |f_zbar|^2 on a grid.

    The unit circle is added as a final ring when the map is resolved (or when
    ``include_boundary`` asks for it); its derivatives are the spectral boundary
    values of g' and h'.
    """
    hmap = _as_map(hmap)
    radii, angles = _grid(radii, angles)
    if include_boundary is None:
        include_boundary = hmap.resolved
    if include_boundary and radii[-1] < 1:
        radii = np.append(radii, 1.0)
    z = np.multiply.outer(radii, np.exp(1j * angles))
    _, fz, fzb = evaluate(hmap, z, derivatives=True)
    a, b = np.abs(fz), np.abs(fzb)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(a > 0, b / np.where(a > 0, a, 1.0), np.where(b > 0, np.inf, 0.0))
    J = a * a - b * b
    idx = np.unravel_index(int(np.argmax(k)), k.shape)
    k_sup = float(k[idx])
    K = (1 + k_sup) / (1 - k_sup) if k_sup < 1 - tol else np.inf
    ring_sup = k.max(axis=1)
    with np.errstate(divide="ignore"):
        ring_K = np.where(ring_sup < 1 - tol, (1 + ring_sup) / (1 - np.minimum(ring_sup, 1 - tol)), np.inf)
    lhs = (a + b) ** 2
    distortion_ok = bool(np.isfinite(K) and np.all(lhs <= K * J * (1 + 1e-9) + 1e-12 * lhs.max()))
    return DilatationReport(radii, angles, k, J, k_sup, float(K), float(J.min()), complex(z[idx]),
                            ring_K, distortion_ok, tol)


@dataclass
class NormalizationReport:
    points: np.ndarray
    arcs: np.ndarray
    length: float
    anchor_error: float
    passed: bool

    def to_dict(self):
        return {"pass": self.passed, "arcs": [float(a) for a in self.arcs],
                "points": [[float(p.real), float(p.imag)] for p in self.points],
                "anchor_error": self.anchor_error}


def _check_injective(boundary):
    l = boundary.target.length
    steps = np.diff(np.append(boundary.correspondence, boundary.correspondence[0] + l))
    if np.any(steps <= 0):
        raise InputError("boundary map is not injective on the samples")


def _anchor_arclength(target, anchor):
    if anchor is None:
        return 0.0
    return float(target.project(complex(anchor))[0])


def normalization_check(hmap, anchor=None, tol=1e-6):
    """Do f(1), f(e^{2pi i/3}), f(e^{4pi i/3}) cut the target into thirds starting at the anchor?

    The anchor is a point of the target curve (default: its arclength origin);
    f(1) must coincide with it and the three arcs must each have length l/3.
    """
    b = _as_boundary(hmap)
    _check_injective(b)
    target = b.target
    l = target.length
    t = 2 * np.pi * np.arange(3) / 3
    pts = b.value_at(t)
    s = target.project(pts)
    arcs = np.mod(np.roll(s, -1) - s, l)
    s0 = _anchor_arclength(target, anchor)
    anchor_err = abs(np.mod(s[0] - s0 + 0.5 * l, l) - 0.5 * l)
    ok = bool(np.all(np.abs(arcs - l / 3) <= tol * l) and anchor_err <= tol * l)
    return NormalizationReport(pts, arcs, l, float(anchor_err), ok)


def _mobius_to_standard(z1, z2, z3):
    """Matrix of the Moebius map sending z1, z2, z3 to 0, 1, infinity."""
    return np.array([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]], dtype=complex)


def _invert_psi(boundary, targets):
    """Angles t with psi(t) = targets (psi continued quasi-periodically, targets increasing)."""
    l = boundary.target.length
    t = np.append(boundary.angles, 2 * np.pi)
    s = np.append(boundary.correspondence, boundary.correspondence[0] + l)
    out = []
    for v in targets:
        turns = np.floor((v - s[0]) / l)
        v0 = v - turns * l
        lo_i = int(np.clip(np.searchsorted(s, v0) - 1, 0, t.size - 2))
        lo, hi = t[lo_i], t[lo_i + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if float(boundary.psi_at(mid)) < v0:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi) + 2 * np.pi * turns)
    return np.array(out)


def renormalize(hmap, anchor=None):
    """Precompose with the disk automorphism making the map pass :func:`normalization_check`.

    The automorphism sends e^{2pi ik/3} to the preimages of the points at
    arclength s0 + kl/3, s0 the anchor. Returns the harmonic map of the new
    boundary samples.
    """
    b = _as_boundary(hmap)
    _check_injective(b)
    l = b.target.length
    s0 = _anchor_arclength(b.target, anchor)
    base = b.correspondence[0]
    s0 = s0 + l * np.ceil((base - s0) / l - 1e-12)
    tk = _invert_psi(b, s0 + l * np.arange(3) / 3)
    src = np.exp(2j * np.pi * np.arange(3) / 3)
    dst = np.exp(1j * tk)
    m = np.linalg.solve(_mobius_to_standard(*dst), _mobius_to_standard(*src))
    (p, q), (r, u) = m
    det = p * u - q * r

    ang0 = np.angle((p + q) / (r + u))

    def theta(t):
        # lift of arg phi(e^{it}) with theta(0) = tk[0]; increasing on [0, 2pi)
        t = np.asarray(t, dtype=float)
        d = np.mod(np.angle((p * np.exp(1j * t) + q) / (r * np.exp(1j * t) + u)) - ang0, 2 * np.pi)
        d = np.where((d > 2 * np.pi - 1e-9) & (t < np.pi), 0.0, d)
        return tk[0] + d

    t = b.angles
    th = theta(t)
    w = np.exp(1j * t)
    dth = np.abs(det / (r * w + u) ** 2)
    values = b.value_at(th)
    deriv = b.derivative_at(th) * dth
    corr = b.psi_at(th)
    shift = l * np.floor(corr[0] / l)
    corr = corr - shift

    def psi_new(tt):
        tt = np.asarray(tt, dtype=float)
        turns = np.floor(tt / (2 * np.pi))
        base_t = tt - 2 * np.pi * turns
        return b.psi_at(theta(base_t.ravel())).reshape(base_t.shape) - shift + l * turns

    return analyze(b.resampled(values, deriv, corr, psi_new))


@dataclass
class LipschitzReport:
    sup_ratio: float
    pair: tuple
    max_df: float
    max_tangential: float
    K: float

    @property
    def tangential_bound(self):
        return self.K * self.max_tangential

    def to_dict(self):
        return {"sup_ratio": self.sup_ratio, "max_df": self.max_df, "max_tangential": self.max_tangential,
                "K": self.K if np.isfinite(self.K) else None,
                "tangential_bound": self.tangential_bound if np.isfinite(self.K) else None,
                "pair": [[float(z.real), float(z.imag)] for z in self.pair]}


def _pair_scan(z, f):
    best, pair = 0.0, (0j, 0j)
    for i in range(0, z.size, 256):
        dz = np.abs(z[i:i + 256, None] - z[None, :])
        df = np.abs(f[i:i + 256, None] - f[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(dz > 1e-14, df / np.where(dz > 1e-14, dz, 1.0), 0.0)
        j = np.unravel_index(int(np.argmax(q)), q.shape)
        if q[j] > best:
            best, pair = float(q[j]), (complex(z[i + j[0]]), complex(z[j[1]]))
    return best, pair


def empirical_lipschitz(hmap, boundary_points=512, radii=None, angles=64, K=None):
    """Sup of |f(z1) - f(z2)| / |z1 - z2| over boundary and interior sample pairs.

    Also reports max |Df| and max |d_phi f| on the grid; the latter times K is the
    mean-value route to a Lipschitz bound.
    """
    hmap = _as_map(hmap)
    tb = 2 * np.pi * np.arange(boundary_points) / boundary_points
    zb = np.exp(1j * tb)
    fb = evaluate(hmap, zb)
    best, pair = _pair_scan(zb, fb)
    radii, ang = _grid(np.concatenate(([0.0], default_radii(8))) if radii is None else radii, angles)
    zi = np.multiply.outer(radii, np.exp(1j * ang)).ravel()
    zi = np.unique(np.round(zi, 15))
    fi = evaluate(hmap, zi)
    b2, p2 = _pair_scan(np.concatenate((zi, zb)), np.concatenate((fi, fb)))
    if b2 > best:
        best, pair = b2, p2
    zg = np.concatenate((zi, zb))
    _, fz, fzb = evaluate(hmap, zg, derivatives=True)
    max_df = float(np.max(np.abs(fz) + np.abs(fzb)))
    _, dt = radial_tangential(hmap, zb)
    max_tan = float(np.abs(dt).max())
    if K is None:
        K = dilatation_field(hmap).K
    return LipschitzReport(best, pair, max_df, max_tan, float(K))


@dataclass
class LowerBoundReport:
    minimum: float
    threshold: float
    margin: float
    passed: bool
    details: dict

    def to_dict(self):
        return {"pass": self.passed, "margin": self.margin, "minimum": self.minimum,
                "threshold": self.threshold, **self.details}


def _require_convex(hmap):
    b = _as_boundary(hmap)
    if not b.target.is_convex():
        raise PreconditionError("target curve is not convex")
    return b


def _grid_derivatives(hmap, radii, angles):
    radii, angles = _grid(np.concatenate(([0.0], default_radii())) if radii is None else radii, angles)
    z = np.multiply.outer(radii, np.exp(1j * angles))
    _, fz, fzb = evaluate(hmap, z, derivatives=True)
    return np.abs(fz), np.abs(fzb)


def heinz_lower_check(hmap, radii=None, angles=128):
    """min |Df| = min(|f_z| + |f_zbar|) against dist(f(0), boundary)/4 (convex targets)."""
    b = _require_convex(hmap)
    hmap = _as_map(hmap)
    a, c = _grid_derivatives(hmap, radii, angles)
    dist = b.target.dist_to(complex(evaluate(hmap, 0.0)))
    m = float((a + c).min())
    return LowerBoundReport(m, dist / 4, m - dist / 4, m >= dist / 4, {"dist": dist})


def jacobian_lower_check(hmap, radii=None, angles=128):
    """min J against kappa*delta/2, kappa = min |d_t f(e^{it})|, delta = dist(f(0), boundary)."""
    b = _require_convex(hmap)
    hmap = _as_map(hmap)
    a, c = _grid_derivatives(hmap, radii, angles)
    kappa = float(np.abs(b.derivative).min())
    delta = b.target.dist_to(complex(evaluate(hmap, 0.0)))
    m = float((a * a - c * c).min())
    thr = kappa * delta / 2
    return LowerBoundReport(m, thr, m - thr, m >= thr, {"kappa": kappa, "delta": delta})


@dataclass
class CriterionReport:
    log_dF_sup: float
    hilbert_sup: float
    predicted_qc: bool
    measured_qc: bool
    measured_K: float

    @property
    def consistent(self):
        return self.predicted_qc == self.measured_qc

    def to_dict(self):
        fin = lambda x: x if np.isfinite(x) else None  # noqa: E731
        return {"log_dF_sup": fin(self.log_dF_sup), "hilbert_sup": fin(self.hilbert_sup),
                "predicted_qc": self.predicted_qc, "measured_qc": self.measured_qc,
                "measured_K": fin(self.measured_K), "consistent": self.consistent}


def convex_qc_criterion(boundary, log_threshold=8.0, hilbert_threshold=50.0, radii=None, angles=256):
    """Predict quasiconformality from sup |log|Psi'|| and sup |H(Psi')| on the samples.

    The Hilbert threshold is relative to max |Psi'|. The prediction is compared
    with the dilatation measured on rings approaching the circle.
    """
    b = _require_convex(boundary)
    speed = np.abs(b.derivative)
    scale = speed.max()
    if scale == 0 or speed.min() <= 1e-12 * scale:
        log_sup = np.inf
    else:
        log_sup = float(np.abs(np.log(speed)).max())
    hil = float(np.abs(hilbert_spectral(b.derivative)).max())
    predicted = bool(np.isfinite(log_sup) and log_sup <= log_threshold and hil <= hilbert_threshold * scale)
    rep = dilatation_field(analyze(b), radii=radii, angles=angles)
    return CriterionReport(log_sup, hil, predicted, rep.is_qc, rep.K)
