"""Moduli of continuity and Dini integrals.

A modulus is nondecreasing and, past the extension point ``length``, frozen at
its value there: ``omega(t) = omega(length)`` for ``t >= length``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _backend
from .errors import InputError


class ModulusOfContinuity:
    """A nondecreasing modulus ``omega`` with a few exact integral helpers.

    Build one through :meth:`power`, :meth:`closed_form` or :meth:`empirical`.
    """

    def __init__(self, kind, length=None):
        self.kind = kind
        self.length = None if length is None else float(length)

    # -- constructors -----------------------------------------------------
    @classmethod
    def power(cls, c, a, length=None):
        """``omega(t) = c * t**a`` with ``0 < a <= 1``."""
        if not (0 < a <= 1) or c < 0:
            raise InputError("power modulus needs c >= 0 and 0 < a <= 1")
        m = cls("power", length)
        m.c, m.a = float(c), float(a)
        return m

    @classmethod
    def closed_form(cls, func, length, primitive=None, name="closed"):
        """User formula; ``primitive(d)`` is the integral of omega over [0, d] if known."""
        m = cls("closed", length)
        m.func, m.primitive, m.name = func, primitive, name
        return m

    @classmethod
    def empirical(cls, t, values, length=None):
        """Table of values on increasing positive nodes; made monotone by a running max."""
        t = np.asarray(t, dtype=float)
        v = np.maximum.accumulate(np.asarray(values, dtype=float))
        if t.ndim != 1 or t.size == 0:
            raise InputError("empirical modulus needs a non-empty grid")
        if np.any(np.diff(t) <= 0) or t[0] <= 0:
            raise InputError("grid must be positive and strictly increasing")
        m = cls("empirical", length)
        m.t, m.values = t, v
        # piecewise-linear through the origin: node arrays with t=0 prepended
        m._tn = np.concatenate(([0.0], t))
        m._vn = np.concatenate(([0.0], v))
        m._cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(m._tn) * (m._vn[1:] + m._vn[:-1]))))
        return m

    # -- evaluation -------------------------------------------------------
    def _clip(self, t):
        t = np.asarray(t, dtype=float)
        if self.length is not None:
            t = np.minimum(t, self.length)
        return t

    def __call__(self, t):
        t = self._clip(t)
        if self.kind == "power":
            return self.c * np.power(np.maximum(t, 0.0), self.a)
        if self.kind == "closed":
            return np.asarray(self.func(t), dtype=float)
        return np.interp(t, self._tn, self._vn)

    @property
    def cap(self):
        """omega(length), or the largest tabulated value for unbounded moduli."""
        if self.length is not None:
            return float(self(self.length))
        if self.kind == "empirical":
            return float(self.values[-1])
        return float("inf")

    def scaled(self, factor):
        """The modulus ``factor * omega``."""
        if self.kind == "power":
            return ModulusOfContinuity.power(self.c * factor, self.a, self.length)
        if self.kind == "empirical":
            return ModulusOfContinuity.empirical(self.t, self.values * factor, self.length)
        prim = None if self.primitive is None else (lambda d, p=self.primitive: factor * p(d))
        return ModulusOfContinuity.closed_form(lambda t, f=self.func: factor * f(t), self.length, prim, self.name)

    def looks_continuous(self):
        """False when the two finest empirical scales show a jump (omega(0+) > 0)."""
        if self.kind != "empirical" or self.t.size < 2:
            return True
        w1, w2 = self.values[0], self.values[1]
        if w1 <= 1e-9 * max(self.values[-1], 1.0):
            return True
        return w1 < 0.9 * w2

    # -- integrals --------------------------------------------------------
    def cumulative(self, d):
        """Integral of omega over [0, d] (vectorized)."""
        d = np.asarray(d, dtype=float)
        out = np.zeros_like(d)
        lo = d if self.length is None else np.minimum(d, self.length)
        if self.kind == "power":
            out = self.c * np.power(np.maximum(lo, 0.0), self.a + 1) / (self.a + 1)
        elif self.kind == "empirical":
            out = self._empirical_cum(lo)
        elif self.primitive is not None:
            out = np.asarray(self.primitive(lo), dtype=float)
        else:
            out = self._table_cum(lo)
        if self.length is not None:
            out = out + self.cap * np.maximum(d - self.length, 0.0)
        return out

    def _empirical_cum(self, d):
        d = np.maximum(d, 0.0)
        j = np.clip(np.searchsorted(self._tn, d, side="right") - 1, 0, self._tn.size - 1)
        t0, v0 = self._tn[j], self._vn[j]
        last = j >= self._tn.size - 1
        t1 = np.where(last, t0 + 1.0, self._tn[np.minimum(j + 1, self._tn.size - 1)])
        v1 = np.where(last, v0, self._vn[np.minimum(j + 1, self._tn.size - 1)])
        slope = (v1 - v0) / (t1 - t0)
        x = d - t0
        return self._cum[j] + v0 * x + 0.5 * slope * x * x

    def _table_cum(self, d):
        if not hasattr(self, "_cum_table"):
            top = self.length if self.length is not None else 1.0
            grid = np.linspace(0.0, top, 20001)
            vals = self(grid)
            cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(grid) * (vals[1:] + vals[:-1]))))
            self._cum_table = (grid, cum)
        grid, cum = self._cum_table
        return np.interp(d, grid, cum)

    def log_integral(self, a, b):
        """Integral of omega(t)/t over [a, b], 0 < a <= b."""
        if not 0 < a <= b:
            raise InputError("log_integral needs 0 < a <= b")
        if a == b:
            return 0.0
        parts = []
        if self.length is not None and b > self.length:
            hi = max(a, self.length)
            parts.append(self.cap * np.log(b / hi))
            b = hi
            if a >= b:
                return float(sum(parts))
        if self.kind == "empirical":
            parts.append(self._empirical_log_integral(a, b))
        elif self.kind == "power":
            parts.append(self.c * (b ** self.a - a ** self.a) / self.a)
        else:
            val, _ = integrate.quad(lambda u: float(self(np.exp(u))), np.log(a), np.log(b),
                                    epsabs=0.0, epsrel=1e-12, limit=200)
            parts.append(val)
        return float(sum(parts))

    def _empirical_log_integral(self, a, b):
        tn, vn = self._tn, self._vn
        knots = tn[(tn > a) & (tn < b)]
        edges = np.concatenate(([a], knots, [b]))
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (lo + hi)
            j = min(np.searchsorted(tn, mid, side="right") - 1, tn.size - 1)
            if j >= tn.size - 1:
                total += vn[-1] * np.log(hi / lo)
                continue
            slope = (vn[j + 1] - vn[j]) / (tn[j + 1] - tn[j])
            icpt = vn[j] - slope * tn[j]
            total += icpt * np.log(hi / lo) + slope * (hi - lo)
        return total

    def inverse_t2_integral(self, a, b):
        """Integral of omega(t)/t**2 over [a, b], 0 < a <= b."""
        if not 0 < a <= b:
            raise InputError("inverse_t2_integral needs 0 < a <= b")
        total = 0.0
        if self.length is not None and b > self.length:
            hi = max(a, self.length)
            total += self.cap * (1 / hi - 1 / b)
            b = hi
            if a >= b:
                return total
        if self.kind == "power":
            e = self.a - 1
            total += self.c * (np.log(b / a) if e == 0 else (b ** e - a ** e) / e)
        elif self.kind == "empirical":
            tn, vn = self._tn, self._vn
            edges = np.concatenate(([a], tn[(tn > a) & (tn < b)], [b]))
            for lo, hi in zip(edges[:-1], edges[1:]):
                j = min(np.searchsorted(tn, 0.5 * (lo + hi), side="right") - 1, tn.size - 1)
                if j >= tn.size - 1:
                    total += vn[-1] * (1 / lo - 1 / hi)
                    continue
                slope = (vn[j + 1] - vn[j]) / (tn[j + 1] - tn[j])
                icpt = vn[j] - slope * tn[j]
                total += icpt * (1 / lo - 1 / hi) + slope * np.log(hi / lo)
        else:
            val, _ = integrate.quad(lambda u: float(self(np.exp(u))) * np.exp(-u), np.log(a), np.log(b),
                                    epsabs=0.0, epsrel=1e-10, limit=400)
            total += val
        return float(total)

    def small_scale_slope(self):
        """Limit of omega(t)/t at 0+, or None when omega is not asymptotically linear."""
        if self.kind == "empirical":
            return self.values[0] / self.t[0]
        if self.kind == "power":
            return self.c if self.a == 1 else None
        return None

    def to_dict(self):
        out = {"kind": self.kind, "length": self.length, "cap": self.cap}
        if self.kind == "power":
            out.update(c=self.c, a=self.a)
        elif self.kind == "closed":
            out["name"] = self.name
        else:
            out["nodes"] = int(self.t.size)
        return out


def modulus_of_continuity(values, spacing, t_grid=None, periodic=True, length=None, backend=None):
    """Empirical modulus of a uniformly sampled function.

    ``values`` are samples at spacing ``spacing``; for a periodic function the
    sample count times ``spacing`` is the period. Each table entry is the sup of
    ``|xi(x) - xi(y)|`` over sampled pairs with ``|x - y| <= t``.
    """
    v = np.asarray(values)
    if v.ndim != 1 or v.size < 2:
        raise InputError("need at least two samples")
    if spacing <= 0:
        raise InputError("spacing must be positive")
    n = v.size
    lags = _backend.lag_oscillation(v.astype(complex), periodic, backend=backend)
    running = np.maximum.accumulate(lags)
    if length is None:
        length = n * spacing if periodic else (n - 1) * spacing
    if t_grid is None:
        top = n // 2 if periodic else n - 1
        t_grid = spacing * np.arange(1, top + 1)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise InputError("empty t grid")
    m = np.floor(t_grid / spacing + 1e-9).astype(int)
    m = np.clip(m, 0, n - 1)
    return ModulusOfContinuity.empirical(t_grid, running[m], length=length)


@dataclass
class DiniResult:
    value: float
    error: float
    is_dini: bool
    levels: int
    ratio: float


def dini_integral(omega, delta, max_levels=40, rtol=1e-13):
    """Integral of omega(t)/t over (0, delta], summed over dyadic shells.

    The shell integrals I_k over [delta 2^-k-1, delta 2^-k] are computed exactly or
    by quadrature; the unresolved tail is extrapolated geometrically from the last
    shell ratio. The integral is flagged divergent when that ratio drifts toward 1.
    """
    if delta <= 0:
        raise InputError("delta must be positive")
    shells = []
    total = 0.0
    hi = float(delta)
    for _ in range(max_levels):
        lo = 0.5 * hi
        shells.append(omega.log_integral(lo, hi))
        total += shells[-1]
        hi = lo
        if len(shells) >= 3 and shells[-1] <= rtol * total:
            break
    shells = np.asarray(shells)
    if total == 0.0:
        return DiniResult(0.0, 0.0, True, len(shells), 0.0)
    ratios = shells[1:] / np.where(shells[:-1] > 0, shells[:-1], np.inf)
    r = float(ratios[-1]) if ratios.size else 0.0
    if shells[-1] <= rtol * total:
        tail = shells[-1] * r / (1 - r) if r < 1 else shells[-1]
        return DiniResult(total + tail, abs(tail) + rtol * total, True, len(shells), r)
    drift = ratios[-1] - ratios[-6] if ratios.size >= 6 else 1.0
    is_dini = r < 1 and drift <= 1e-4
    if not is_dini:
        return DiniResult(total, float("inf"), False, len(shells), r)
    tail = shells[-1] * r / (1 - r)
    wobble = abs(ratios[-1] - ratios[-2]) if ratios.size >= 2 else 1.0
    return DiniResult(total + tail, abs(tail) * wobble / (1 - r) + rtol * total, True, len(shells), r)
