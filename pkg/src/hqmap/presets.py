"""Built-in curve and boundary-map specs.

Names take optional ``key=value`` parameters after a colon, e.g. ``ellipse:a=2,b=1``.
"""

import numpy as np

from .curves import FourierParam
from .errors import InputError

_DEFAULTS = {
    "circle": {"r": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "affine": {"a": 0.5},
    "quadratic": {"b": 0.25},
    "nonqc": {"N": 1024},
    "star": {"eps": 0.02, "k": 5},
    "identity": {},
}

_DESCRIPTIONS = {
    "circle": "circle of radius r (curve)",
    "ellipse": "ellipse with semi-axes a, b (curve)",
    "affine": "boundary map e^{it} + a e^{-it}, i.e. f = z + a conj(z)",
    "quadratic": "boundary map e^{it} + b e^{-2it}, i.e. f = z + b conj(z^2)",
    "nonqc": "samples of e^{i(t - sin t)} on the unit circle (not quasiconformal)",
    "star": "star curve e^{it}(1 + eps cos(kt)) with a Lipschitz power-law modulus",
    "identity": "identity map of the unit circle",
}

_ALIASES = {"affine_a0.5": "affine:a=0.5", "quadratic_b0.25": "quadratic:b=0.25"}


def presets():
    """Names and one-line descriptions of the built-in specs."""
    return [{"name": k, "defaults": v, "description": _DESCRIPTIONS[k]} for k, v in _DEFAULTS.items()]


def _parse(name):
    name = _ALIASES.get(name, name)
    base, _, rest = name.partition(":")
    if base not in _DEFAULTS:
        raise InputError(f"unknown preset {base!r}")
    params = dict(_DEFAULTS[base])
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key not in params:
            raise InputError(f"bad preset parameter {item!r} for {base}")
        try:
            params[key] = type(params[key])(float(val)) if isinstance(params[key], int) else float(val)
        except ValueError as exc:
            raise InputError(f"bad preset parameter {item!r}") from exc
    return base, params


def _star_curvature_bound(eps, k):
    coeffs = {1: 1.0, k + 1: eps / 2, 1 - k: eps / 2}
    p = FourierParam(coeffs)
    t = 2 * np.pi * np.arange(1 << 14) / (1 << 14)
    d1, d2 = p.derivative(t), p.derivative(t, 2)
    kappa = np.abs(np.imag(np.conj(d1) * d2)) / np.abs(d1) ** 3
    return coeffs, float(kappa.max())


def expand_preset(name):
    """The JSON-style spec dict for a preset name."""
    base, p = _parse(name)
    if base == "circle":
        return {"type": "circle", "r": p["r"]}
    if base == "identity":
        return {"type": "trig", "coeffs": [[1, 1.0, 0.0]]}
    if base == "ellipse":
        return {"type": "ellipse", "a": p["a"], "b": p["b"]}
    if base == "affine":
        if not 0 <= p["a"] < 1:
            raise InputError("affine preset needs 0 <= a < 1")
        return {"type": "trig", "coeffs": [[1, 1, 0], [-1, p["a"], 0]]}
    if base == "quadratic":
        if not 0 <= p["b"] < 0.5:
            raise InputError("quadratic preset needs 0 <= b < 1/2")
        return {"type": "trig", "coeffs": [[1, 1, 0], [-2, p["b"], 0]]}
    if base == "nonqc":
        n = int(p["N"])
        t = 2 * np.pi * np.arange(n) / n
        v = np.exp(1j * (t - np.sin(t)))
        return {"type": "samples", "values": [[float(z.real), float(z.imag)] for z in v],
                "curve": {"type": "circle", "r": 1.0}}
    eps, k = p["eps"], int(p["k"])
    if not 0 <= eps < 1 or k < 1:
        raise InputError("star preset needs 0 <= eps < 1 and k >= 1")
    coeffs, kappa = _star_curvature_bound(eps, k)
    # |g'(s) - g'(t)| <= kappa_max |s - t|, padded against sampling of the maximum
    return {"type": "fourier", "coeffs": [[n, float(c), 0.0] for n, c in sorted(coeffs.items())],
            "omega": {"kind": "power", "c": 1.001 * kappa, "a": 1.0}}
