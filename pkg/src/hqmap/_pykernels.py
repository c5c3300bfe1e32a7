"""Numpy implementations of the inner loops (fallback when the extension is absent)."""

import numpy as np


def lag_oscillation(v, periodic, m0, m1):
    n = v.shape[0]
    out = np.zeros(m1 - m0)
    for m in range(m0, m1):
        if periodic:
            diff = np.roll(v, -m) - v
        else:
            diff = v[m:] - v[: n - m]
        out[m - m0] = np.abs(diff).max() if diff.size else 0.0
    return out


def chord_arc_lags(p, m0, m1):
    ratio = np.zeros(m1 - m0)
    argi = np.zeros(m1 - m0, dtype=np.int64)
    chord = np.zeros(m1 - m0)
    for m in range(m0, m1):
        c = np.abs(np.roll(p, -m) - p)
        i = int(np.argmin(c))
        chord[m - m0] = c[i]
        argi[m - m0] = i
        ratio[m - m0] = 1.0 / c[i] if c[i] > 0 else 1e300
    return ratio, argi, chord


def odd_difference_sum(v, offsets, weights, j0, j1):
    n = v.shape[0]
    j = np.arange(j0, j1)
    out = np.zeros(j1 - j0, dtype=complex)
    for o, w in zip(offsets, weights):
        out += w * (v[(j + o) % n] - v[(j - o) % n])
    return out


def jacobian_sum(v, d, offsets, weights, j0, j1):
    n = v.shape[0]
    j = np.arange(j0, j1)
    rot = 1j * d[j0:j1]
    base = v[j0:j1]
    out = np.zeros(j1 - j0)
    for o, w in zip(offsets, weights):
        delta = v[(j + o) % n] - base
        out += w * (delta.real * rot.real + delta.imag * rot.imag)
    return out
