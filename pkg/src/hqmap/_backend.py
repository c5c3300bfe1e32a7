"""Select the compiled kernels when available, else the numpy fallback.

Set ``HQMAP_PURE_PYTHON=1`` to force the fallback. ``HQMAP_THREADS`` caps the
number of worker threads used to split kernel sweeps (default 1).
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

try:
    if os.environ.get("HQMAP_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("forced fallback")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def backend_module(name=None):
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown backend {name!r}")


def thread_count():
    try:
        n = int(os.environ.get("HQMAP_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _chunks(lo, hi, parts):
    edges = np.linspace(lo, hi, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _run(fn, lo, hi, args, concat):
    parts = min(thread_count(), max(1, hi - lo))
    if parts == 1:
        return fn(*args, lo, hi)
    spans = _chunks(lo, hi, parts)
    with ThreadPoolExecutor(max_workers=parts) as pool:
        results = list(pool.map(lambda s: fn(*args, s[0], s[1]), spans))
    # results are gathered in span order, so reductions stay deterministic
    return concat(results)


def _cat(results):
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(parts) for parts in zip(*results))
    return np.concatenate(results)


def lag_oscillation(values, periodic, backend=None):
    """Largest |v[i+m] - v[i]| over i, for every lag m = 0..n-1."""
    v = np.ascontiguousarray(values, dtype=np.complex128)
    mod = backend_module(backend)
    return _run(mod.lag_oscillation, 0, v.shape[0], (v, bool(periodic)), _cat)


def chord_arc_lags(points, backend=None):
    """Per-lag 1/min-chord, argmin start index and min chord, lags 1..n//2."""
    p = np.ascontiguousarray(points, dtype=np.complex128)
    mod = backend_module(backend)
    return _run(mod.chord_arc_lags, 1, p.shape[0] // 2 + 1, (p,), _cat)


def odd_difference_sum(values, offsets, weights, backend=None):
    """out[j] = sum_k w_k (v[j+o_k] - v[j-o_k]), indices mod n."""
    v = np.ascontiguousarray(values, dtype=np.complex128)
    o = np.ascontiguousarray(offsets, dtype=np.int64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    mod = backend_module(backend)
    return _run(mod.odd_difference_sum, 0, v.shape[0], (v, o, w), _cat)


def jacobian_sum(values, derivative, offsets, weights, backend=None):
    """out[j] = sum_k w_k Re[conj(v[j+o_k] - v[j]) * i d[j]], indices mod n."""
    v = np.ascontiguousarray(values, dtype=np.complex128)
    d = np.ascontiguousarray(derivative, dtype=np.complex128)
    o = np.ascontiguousarray(offsets, dtype=np.int64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    mod = backend_module(backend)
    return _run(mod.jacobian_sum, 0, v.shape[0], (v, d, o, w), _cat)
