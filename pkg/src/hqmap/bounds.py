"""Explicit Lipschitz bounds for harmonic quasiconformal maps onto Dini-smooth domains.

Three ingredients:

* Hoelder constants (alpha, Lambda) of normalized K-q.c. maps onto a chord-arc domain;
* a convex majorant chi built from the dyadic breakpoints of int_0^x A;
* the final estimate L <= (pi^2/2) K chi^{-1}(Upsilon).

Breakpoints live in log space, so levels far below double-precision underflow are fine.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import CertificateUnavailableError, InputError, RangeError
from .modulus import ModulusOfContinuity, dini_integral

C1 = np.pi / 4
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_LN2 = math.log(2.0)


# -- Hoelder constants -------------------------------------------------------

@dataclass
class MoriBound:
    K: float
    B_gamma: float
    area: float
    alpha: float
    Lambda: float

    def holder_ratio(self, z, f):
        """max |f(z1) - f(z2)| / (Lambda |z1 - z2|^alpha) over all sample pairs (<= 1 means it holds)."""
        z = np.asarray(z, dtype=complex).ravel()
        f = np.asarray(f, dtype=complex).ravel()
        worst = 0.0
        for i in range(0, z.size, 256):
            dz = np.abs(z[i:i + 256, None] - z[None, :])
            df = np.abs(f[i:i + 256, None] - f[None, :])
            mask = dz > 0
            if np.any(mask):
                worst = max(worst, float(np.max(df[mask] / (self.Lambda * dz[mask] ** self.alpha))))
        return worst

    def holds(self, z, f, slack=1e-12):
        return self.holder_ratio(z, f) <= 1 + slack

    def to_dict(self):
        return {"K": self.K, "B_gamma": self.B_gamma, "area": self.area, "alpha": self.alpha,
                "Lambda": self.Lambda}


def mori_holder(K, B_gamma, area):
    """alpha = 2/(K(1+2B)^2), Lambda = 4 2^alpha (1+2B) sqrt(2 pi K |Omega| / log 2)."""
    if not K >= 1:
        raise InputError("K must be >= 1")
    if not B_gamma >= 1:
        raise InputError("chord-arc constant must be >= 1")
    if not area > 0:
        raise InputError("area must be positive")
    s = 1 + 2 * B_gamma
    alpha = 2 / (K * s * s)
    lam = 4 * 2 ** alpha * s * math.sqrt(2 * math.pi * K * area / _LN2)
    return MoriBound(float(K), float(B_gamma), float(area), alpha, lam)


# -- integrable weights -------------------------------------------------------

class IntegrableFunction:
    """Nonnegative A on (0, B] with exact (or tabulated) cumulative integrals.

    Subclasses provide ``__call__``, ``log_cumulative(lx)`` (log of int_0^x A at
    x = e^lx), ``first_moment(x)`` (int_0^x y A(y) dy) and ``solve(log_target)``
    (the x, in log form, at which the cumulative integral reaches a target).
    """

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        pos = x > 0
        out[pos] = np.exp([self.log_cumulative(v) for v in np.log(x[pos])])
        return out if out.ndim else float(out)

    def solve(self, log_target, lo, hi):
        f = lambda lx: self.log_cumulative(lx) - log_target  # noqa: E731
        while f(lo) > 0:
            lo -= 2 * (hi - lo) + 50
        if f(hi) <= 0:
            return hi
        return brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


class PowerMixture(IntegrableFunction):
    """A(x) = sum_i w_i x^p_i with w_i > 0 and p_i > -1."""

    def __init__(self, weights, powers):
        self.w = np.atleast_1d(np.asarray(weights, dtype=float))
        self.p = np.atleast_1d(np.asarray(powers, dtype=float))
        if self.w.shape != self.p.shape or self.w.size == 0:
            raise InputError("weights and powers must have the same nonzero length")
        if np.any(self.w <= 0):
            raise InputError("weights must be positive")
        if np.any(self.p <= -1):
            raise InputError("A is not integrable at 0 (a power <= -1)")
        self._lc = np.log(self.w / (self.p + 1))

    @classmethod
    def constant(cls, c=1.0):
        return cls([c], [0.0])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(self.w[:, None] * np.power.outer(np.atleast_1d(x), self.p).T, axis=0).reshape(x.shape)

    def log_cumulative(self, lx):
        return float(logsumexp(self._lc + (self.p + 1) * lx))

    def first_moment(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(self.w[:, None] / (self.p[:, None] + 2) * np.power.outer(np.atleast_1d(x), self.p + 2).T,
                      axis=0).reshape(x.shape)

    def solve(self, log_target, lo, hi):
        if self.p.size == 1:
            return (log_target - self._lc[0]) / (self.p[0] + 1)
        # the smallest power dominates near 0; start the bracket from its inverse
        j = int(np.argmin(self.p))
        guess = (log_target - self._lc[j]) / (self.p[j] + 1)
        return super().solve(log_target, min(guess, hi) - 1.0, hi)

    def describe(self):
        return {"kind": "power_mixture", "weights": self.w.tolist(), "powers": self.p.tolist()}


class ModulusOverT(IntegrableFunction):
    """A(y) = omega(y)/y on (0, top], with omega frozen at omega(l) beyond its length.

    The cumulative integral is tabulated on a geometric grid (cells integrated
    exactly for empirical and power moduli). Below the first node omega is
    treated as c y^a: exactly for empirical (a = 1) and power moduli, by a two-point
    fit for closed forms.
    """

    def __init__(self, omega, top, nodes=400):
        self.omega = omega
        self.top = float(top)
        length = omega.length if omega.length is not None else self.top
        if omega.kind == "empirical":
            g0 = float(omega.t[0])
            self._a = 1.0
            self._c = float(omega.values[0] / omega.t[0])
        elif omega.kind == "power":
            g0 = min(length, self.top)
            self._a, self._c = omega.a, omega.c
        else:
            g0 = 1e-6 * length
            w1, w0 = float(omega(g0)), float(omega(g0 / 10))
            if w0 <= 0 or w1 <= 0:
                raise InputError("modulus vanishes near 0")
            a = math.log(w1 / w0) / math.log(10.0)
            self._a = 1.0 if abs(a - 1) < 1e-6 else min(max(a, 1e-6), 1.0)
            self._c = w1 / g0 ** self._a
        if self._c <= 0:
            raise CertificateUnavailableError("modulus of continuity is identically zero near 0")
        g0 = min(g0, self.top)
        count = max(2, nodes) if self.top > g0 else 1
        self._lg = np.linspace(math.log(g0), math.log(self.top), count)
        g = np.exp(self._lg)
        head = self._c * g0 ** self._a / self._a
        cells = [omega.log_integral(g[i], g[i + 1]) for i in range(g.size - 1)]
        self._table = head + np.concatenate(([0.0], np.cumsum(cells)))
        self._ltable = np.log(self._table)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return self.omega(y) / y

    def _lower(self, lx):
        return math.log(self._c / self._a) + self._a * lx

    def log_cumulative(self, lx):
        if lx <= self._lg[0]:
            return self._lower(lx)
        j = min(int(np.searchsorted(self._lg, lx)) - 1, self._lg.size - 1)
        x = math.exp(lx)
        gj = math.exp(self._lg[j])
        extra = self.omega.log_integral(gj, x) if x > gj else 0.0
        return math.log(self._table[j] + extra)

    def first_moment(self, x):
        return self.omega.cumulative(x)

    def solve(self, log_target, lo, hi):
        if log_target <= self._ltable[0]:
            return (log_target - math.log(self._c / self._a)) / self._a
        j = int(np.searchsorted(self._ltable, log_target)) - 1
        j = min(j, self._lg.size - 2)
        if j < 0:
            return self._lg[0]
        a, b = self._lg[j], self._lg[j + 1]
        if log_target >= self._ltable[-1]:
            return self._lg[-1]
        f = lambda lx: self.log_cumulative(lx) - log_target  # noqa: E731
        return brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=500)

    def describe(self):
        return {"kind": "omega_over_t", "omega": self.omega.to_dict(), "top": self.top}


def parse_integrable(spec):
    """Parse ``const:c``, ``power:c,p`` or ``mix:c1,p1;c2,p2;...``."""
    try:
        kind, _, body = spec.partition(":")
        if kind == "const":
            return PowerMixture.constant(float(body or 1.0))
        if kind in ("power", "mix"):
            terms = [t.split(",") for t in body.split(";") if t.strip()]
            return PowerMixture([float(c) for c, _ in terms], [float(p) for _, p in terms])
    except ValueError as exc:
        raise InputError(f"malformed A spec {spec!r}") from exc
    raise InputError(f"unknown A spec {spec!r} (use const:, power: or mix:)")


# -- the convex majorant ----------------------------------------------------------

class ConvexMajorant:
    """xi piecewise linear with xi(x_k) = k, and chi(y) = xi((Q_eff / y)^tau).

    For q >= 1 the exponent is tau = 1/q and Q_eff = Q, so chi(Q x^-q) = xi(x).
    For q < 1 the exponent is capped at tau = 1 (x chi(x) stays convex) with
    Q_eff = Q B^(1-q); then chi(Q x^-q) = xi(B (x/B)^q) <= xi(x).
    xi is extended by 0 for x >= B.
    """

    def __init__(self, A, B, q, Q, eps=1e-12, max_levels=1_000_000):
        if not (q > 0 and Q > 0 and B > 0):
            raise InputError("need q > 0, Q > 0 and B > 0")
        self.A, self.B, self.q, self.Q = A, float(B), float(q), float(Q)
        self.eps = eps
        self.max_levels = max_levels
        self.tau = min(1.0, 1.0 / self.q)
        self.log_Q_eff = math.log(self.Q) + (0.0 if self.q >= 1 else (1 - self.q) * math.log(self.B))
        self.log_M = A.log_cumulative(math.log(self.B))
        if not np.isfinite(self.log_M):
            raise InputError("A is not integrable on (0, B]")
        self.M = math.exp(self.log_M)
        self._lx = [math.log(self.B)]

    # breakpoints
    def extend(self, k):
        """Make sure x_0..x_k exist."""
        cap = math.log(0.5) + math.log1p(-self.eps)
        while len(self._lx) <= min(k, self.max_levels):
            j = len(self._lx)
            prev = self._lx[-1]
            root = self.A.solve(self.log_M - j * _LN2, prev - 60.0, prev)
            lx = min(root, prev + cap)
            if not np.isfinite(lx) or lx < -1e300:
                raise RangeError("breakpoint underflow", j - 1)
            self._lx.append(lx)
        if k > self.max_levels:
            raise RangeError(f"breakpoint level {k} beyond the supported depth", self.levels)

    @property
    def levels(self):
        return len(self._lx) - 1

    @property
    def log_breakpoints(self):
        return np.array(self._lx)

    @property
    def breakpoints(self):
        return np.exp(self._lx)

    def _log_xi_arg(self, y):
        return self.tau * (self.log_Q_eff - np.log(y))

    def xi_log(self, lu):
        """xi at x = e^lu (vectorized)."""
        lu = np.atleast_1d(np.asarray(lu, dtype=float))
        out = np.zeros(lu.shape)
        inside = lu < self._lx[0]
        if np.any(inside):
            deepest = lu[inside].min()
            if not np.isfinite(deepest):
                raise RangeError("xi evaluated at 0", self.levels)
            while self._lx[-1] > deepest:
                self.extend(len(self._lx) + max(8, len(self._lx) // 4))
            lxs = np.array(self._lx)
            k = np.searchsorted(-lxs, -lu[inside], side="right") - 1
            k = np.clip(k, 0, lxs.size - 2)
            lk, lk1 = lxs[k], lxs[k + 1]
            # (x_k - u) / (x_k - x_{k+1}) without leaving log space
            num = -np.expm1(lu[inside] - lk)
            den = -np.expm1(lk1 - lk)
            out[inside] = k + num / den
        return out

    def xi(self, x):
        x = np.asarray(x, dtype=float)
        return self.xi_log(np.log(x)).reshape(x.shape)

    def chi(self, y):
        y = np.asarray(y, dtype=float)
        return self.xi_log(self._log_xi_arg(y)).reshape(y.shape)

    def chi_log(self, ly):
        """chi at y = e^ly, for arguments beyond the float range."""
        ly = np.asarray(ly, dtype=float)
        return self.xi_log(self.tau * (self.log_Q_eff - ly)).reshape(ly.shape)

    def log_xi_inv(self, v):
        """log of the u with xi(u) = v, for v > 0."""
        if v <= 0:
            return self._lx[0]
        k = int(math.floor(v))
        self.extend(k + 1)
        frac = v - k
        lk, lk1 = self._lx[k], self._lx[k + 1]
        return lk + math.log1p(-frac * (-math.expm1(lk1 - lk)))

    def log_chi_inv(self, v):
        """log of chi^{-1}(v); chi^{-1}(0) is the left end of the support of chi."""
        return self.log_Q_eff - self.log_xi_inv(v) / self.tau

    def chi_inv(self, v):
        """chi^{-1}(v); inf when it lies beyond the float range (use log_chi_inv)."""
        lv = self.log_chi_inv(v)
        return math.exp(lv) if lv < 709.0 else math.inf

    # certificates
    def ratio(self, tol=1e-17):
        """(int_0^B A(x) chi(Q x^-q) dx / int_0^B A, truncation error bound)."""
        total = 0.0
        k = 0
        while True:
            self.extend(k + 1)
            lk, lk1 = self._lx[k], self._lx[k + 1]
            total += self._segment(k, lk, lk1)
            if self.A.log_cumulative(lk1) - self.log_M < math.log(tol) or k > 5000:
                break
            k += 1
        deep = k + 1
        # int_0^{x_deep} A xi <= sum_{j >= deep} (j+1) M 2^-j
        tail = (deep + 2) * 2.0 ** (1 - deep)
        return total / self.M, tail

    def _segment(self, k, lk, lk1):
        xk, xk1 = math.exp(lk), math.exp(lk1)
        d = xk - xk1
        if self.q >= 1:
            cum = math.exp(self.A.log_cumulative(lk)) - math.exp(self.A.log_cumulative(lk1))
            mom = float(self.A.first_moment(xk) - self.A.first_moment(xk1))
            return (k + xk / d) * cum - mom / d
        # x-range mapped onto [x_{k+1}, x_k] by u = B (x/B)^q
        a = self.B * (xk1 / self.B) ** (1 / self.q)
        b = self.B * (xk / self.B) ** (1 / self.q)
        x = 0.5 * (b - a) * _GL_X + 0.5 * (b + a)
        u = self.B * (x / self.B) ** self.q
        return 0.5 * (b - a) * float(np.dot(_GL_W, self.A(x) * (k + (xk - u) / d)))

    def convexity_defect(self, n=200, levels=40):
        """Largest midpoint-convexity violation of y chi(y) on an n-point log grid (<= 0 passes).

        Each triple is scaled by its middle abscissa, so grids reaching past the
        float range are tested without overflow.
        """
        self.extend(levels)
        lo = self.log_chi_inv(0.0) - 1.0
        hi = self.log_chi_inv(float(levels))
        ly = np.linspace(lo, hi, n)
        c = self.chi_log(ly)
        r0 = np.exp(ly[:-2] - ly[1:-1])
        q2 = np.exp(ly[1:-1] - ly[2:])
        # chord weight w = (y1 - y0)/(y2 - y0), and w y2/y1, without forming y2/y1
        w = (1 - r0) * q2 / (1 - r0 * q2)
        w2 = (1 - r0) / (1 - r0 * q2)
        chord = r0 * c[:-2] * (1 - w) + w2 * c[2:]
        scale = np.maximum(np.abs(c[1:-1]), 1e-300)
        return float(np.max((c[1:-1] - chord) / scale - 1e-10))

    def to_dict(self):
        return {"B": self.B, "q": self.q, "Q": self.Q, "tau": self.tau, "M": self.M,
                "levels": self.levels, "log_x": [float(v) for v in self._lx[:64]]}


def eremenko_majorant(A, B, q, Q, eps=1e-12):
    """Build the convex majorant for weight A on [0, B] (see :class:`ConvexMajorant`)."""
    if isinstance(A, str):
        A = parse_integrable(A)
    m = ConvexMajorant(A, B, q, Q, eps=eps)
    m.extend(8)
    return m


# -- certificate -------------------------------------------------------------------

@dataclass
class UpsilonResult:
    Upsilon: float
    B: float
    Q: float
    log_Q: float
    integral: float
    error: float
    formula: str


def upsilon(K, curve, omega, mori, formula="corrected"):
    """Upsilon and the (B, Q) pair of the final estimate.

    ``corrected`` uses the substitution y = B_gamma Lambda x^alpha as carried out:
    Upsilon = 8 K C1 B_gamma / alpha * I and Q = omega(l) (B_gamma Lambda)^(2/alpha).
    ``literal`` keeps the printed form 8 K C1 B_gamma / (B_gamma Lambda alpha) * I
    and exponent 2 - 2/alpha; it is reported for audit only.
    """
    a, bl = mori.alpha, mori.B_gamma * mori.Lambda
    B = bl * math.pi ** a
    if omega.length is None:
        omega = _with_length(omega, curve.length)
    res = dini_integral(omega, B)
    if not res.is_dini or not np.isfinite(res.value):
        raise CertificateUnavailableError("modulus of continuity is not Dini on (0, B]")
    wl = float(omega(curve.length))
    if wl <= 0:
        raise CertificateUnavailableError("omega(l) vanishes")
    if formula == "corrected":
        pref = 8 * K * C1 * mori.B_gamma / a
        log_Q = math.log(wl) + (2 / a) * math.log(bl)
    elif formula == "literal":
        pref = 8 * K * C1 * mori.B_gamma / (bl * a)
        log_Q = math.log(wl) + (2 - 2 / a) * math.log(bl)
    else:
        raise InputError("formula must be 'corrected' or 'literal'")
    Q = math.exp(log_Q) if log_Q < 700 else float("inf")
    return UpsilonResult(pref * res.value, B, Q, log_Q, res.value, pref * res.error, formula)


def _with_length(omega, length):
    if omega.kind == "power":
        return ModulusOfContinuity.power(omega.c, omega.a, length)
    if omega.kind == "empirical":
        return ModulusOfContinuity.empirical(omega.t, omega.values, length)
    return ModulusOfContinuity.closed_form(omega.func, length, omega.primitive, omega.name)


class _LogQMajorant(ConvexMajorant):
    """Majorant parametrized by log Q, so astronomically large Q stays representable."""

    def __init__(self, A, B, q, log_Q, eps=1e-12):
        super().__init__(A, B, q, 1.0, eps=eps)
        self.Q = math.exp(log_Q) if log_Q < 700 else float("inf")
        self.log_Q_eff = log_Q + (0.0 if self.q >= 1 else (1 - self.q) * math.log(self.B))


@dataclass
class LipschitzCertificate:
    K: float
    B_gamma: float
    area: float
    length: float
    alpha: float
    Lambda: float
    B: float
    Q: float
    log_Q: float
    q: float
    Upsilon: float
    Upsilon_error: float
    L_bound_log10: float
    formula: str
    levels: int
    omega: dict = field(repr=False)
    literal: dict = field(default=None, repr=False)
    C1: float = C1

    @property
    def L_bound(self):
        return 10 ** self.L_bound_log10 if self.L_bound_log10 < 308 else float("inf")

    @property
    def lipschitz_constant(self):
        """K L_bound: the Lipschitz constant of the map in the disk."""
        v = self.L_bound_log10 + math.log10(self.K)
        return 10 ** v if v < 308 else float("inf")

    def covers(self, value):
        """True when the certified bound is at least ``value``."""
        return value <= 0 or math.log10(value) <= self.L_bound_log10 + 1e-12

    def to_dict(self):
        fin = lambda x: x if np.isfinite(x) else None  # noqa: E731
        out = {"K": self.K, "B_gamma": self.B_gamma, "alpha": self.alpha, "Lambda": self.Lambda,
               "B": self.B, "Q": fin(self.Q), "log10_Q": self.log_Q / math.log(10), "q": self.q,
               "Upsilon": self.Upsilon, "C1": self.C1, "L_bound": fin(self.L_bound),
               "L_bound_log10": self.L_bound_log10, "formula": self.formula,
               "audit": {"x_k_count": self.levels,
                         "quadrature_errors": {"Upsilon": self.Upsilon_error},
                         "area": self.area, "length": self.length, "omega": self.omega}}
        if self.literal is not None:
            out["audit"]["literal"] = self.literal
        return out


def _certify(K, curve, omega, mori, formula):
    up = upsilon(K, curve, omega, mori, formula)
    q = 2 / mori.alpha - 1
    om = omega if omega.length is not None else _with_length(omega, curve.length)
    A = ModulusOverT(om, up.B)
    maj = _LogQMajorant(A, up.B, q, up.log_Q)
    log_y = maj.log_chi_inv(up.Upsilon)
    log10_L = (math.log(np.pi ** 2 / 2 * K) + log_y) / math.log(10)
    return up, q, maj, log10_L


def lipschitz_certificate(K, curve, omega=None, formula="corrected", audit_literal=True):
    """Certified bound L >= max |Psi'| for K-q.c. harmonic maps onto the curve's interior.

    Intermediates are recorded for audit; with ``audit_literal`` the printed
    variant of Upsilon and Q is evaluated alongside.
    """
    omega = curve.modulus() if omega is None else omega
    mori = mori_holder(K, curve.chord_arc, curve.enclosed_area)
    up, q, maj, log10_L = _certify(K, curve, omega, mori, formula)
    literal = None
    if audit_literal and formula != "literal":
        try:
            lu, _, lmaj, l10 = _certify(K, curve, omega, mori, "literal")
            literal = {"Upsilon": float(lu.Upsilon), "log10_Q": lu.log_Q / math.log(10), "L_bound_log10": l10,
                       "L_bound": 10 ** l10 if l10 < 308 else None}
        except (RangeError, CertificateUnavailableError) as exc:
            literal = {"error": str(exc)}
    return LipschitzCertificate(float(K), mori.B_gamma, mori.area, curve.length, mori.alpha, mori.Lambda,
                                up.B, up.Q, up.log_Q, q, up.Upsilon, up.error, log10_L, formula,
                                maj.levels, omega.to_dict(), literal)


def jensen_diagnostic(boundary, K, certificate=None, omega=None, n=4096):
    """Re-check the two inequalities behind the certificate at phi = argmax |Psi'|.

    ``pointwise``: L <= K C1 int rho(x)/x^2 omega(rho(x)) dx.
    ``jensen``: Phi(m) <= mean Phi(m(x)), Phi(t) = t chi(t), m = L/(2 pi K C1).
    """
    target = boundary.target
    omega = target.modulus() if omega is None else omega
    l = target.length
    j = int(np.argmax(np.abs(boundary.derivative)))
    phi = boundary.angles[j]
    L = float(np.abs(boundary.derivative[j]))
    x = -np.pi + 2 * np.pi * (np.arange(n) + 0.5) / n
    d = np.abs(boundary.psi_table_at(phi + x) - boundary.psi_table_at(phi))
    rho = np.minimum(np.mod(d, l), l - np.mod(d, l))
    mx = rho / x ** 2 * omega(rho)
    rhs = K * C1 * float(np.sum(mx) * 2 * np.pi / n)
    out = {"phi": float(phi), "L": L, "pointwise_rhs": rhs, "pointwise_ok": L <= rhs * (1 + 1e-6)}
    if certificate is not None:
        A = ModulusOverT(omega if omega.length is not None else _with_length(omega, l), certificate.B)
        maj = _LogQMajorant(A, certificate.B, certificate.q, certificate.log_Q)
        m = L / (2 * np.pi * K * C1)
        lhs = m * float(maj.chi(m))
        avg = float(np.mean(mx * maj.chi(np.maximum(mx, 1e-300))))
        out.update(m=m, jensen_lhs=lhs, jensen_rhs=avg, jensen_ok=lhs <= avg * (1 + 1e-9) + 1e-300)
    return out
