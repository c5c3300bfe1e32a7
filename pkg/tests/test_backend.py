import numpy as np
import pytest

from hqmap import BACKEND, _backend

compiled = pytest.mark.skipif(BACKEND != "compiled", reason="compiled kernels not built")


def _data(n=512, seed=3):
    r = np.random.default_rng(seed)
    v = r.standard_normal(n) + 1j * r.standard_normal(n)
    d = r.standard_normal(n) + 1j * r.standard_normal(n)
    offsets = np.concatenate((-np.arange(1, n // 2, 2)[::-1], np.arange(1, n // 2, 2)))
    w = r.standard_normal(offsets.size)
    return v, d, offsets, w


def _all_kernels(backend):
    v, d, o, w = _data()
    pos = o[o > 0]
    return {
        "lag": _backend.lag_oscillation(v, True, backend=backend),
        "lag_open": _backend.lag_oscillation(v, False, backend=backend),
        "chord": _backend.chord_arc_lags(np.exp(2j * np.pi * np.arange(256) / 256) * (1 + 0.1 * v[:256].real),
                                         backend=backend),
        "odd": _backend.odd_difference_sum(v, pos, w[: pos.size], backend=backend),
        "jac": _backend.jacobian_sum(v, d, o, w, backend=backend),
    }


@compiled
def test_compiled_matches_python():
    a, b = _all_kernels("compiled"), _all_kernels("python")
    for key in a:
        left, right = a[key], b[key]
        if isinstance(left, tuple):
            for x, y in zip(left, right):
                assert np.allclose(x, y, rtol=1e-13, atol=1e-13), key
        else:
            assert np.allclose(left, right, rtol=1e-13, atol=1e-13), key


def test_python_kernels_against_direct_loops():
    v, d, o, w = _data(64)
    n = v.size
    lag = _backend.lag_oscillation(v, True, backend="python")
    for m in (0, 1, 7, 33):
        assert lag[m] == pytest.approx(max(abs(v[(i + m) % n] - v[i]) for i in range(n)))
    jac = _backend.jacobian_sum(v, d, o, w, backend="python")
    j = 5
    ref = sum(wk * (np.conj(v[(j + ok) % n] - v[j]) * 1j * d[j]).real for ok, wk in zip(o, w))
    assert jac[j] == pytest.approx(ref, rel=1e-12)
    pos = o[o > 0]
    odd = _backend.odd_difference_sum(v, pos, w[: pos.size], backend="python")
    ref = sum(wk * (v[(j + ok) % n] - v[(j - ok) % n]) for ok, wk in zip(pos, w[: pos.size]))
    assert odd[j] == pytest.approx(ref, rel=1e-12)


def test_chord_arc_lags_direct():
    p = np.exp(2j * np.pi * np.arange(32) / 32) * (1 + 0.05 * np.cos(3 * np.arange(32)))
    inv, arg, chord = _backend.chord_arc_lags(p, backend="python")
    for m in (1, 5, 16):
        chords = [abs(p[(i + m) % 32] - p[i]) for i in range(32)]
        assert chord.min() <= min(chords)
        assert inv[m - 1] == pytest.approx(1 / min(chords))


def test_threaded_split_is_deterministic(monkeypatch):
    one = _all_kernels(None)
    monkeypatch.setenv("HQMAP_THREADS", "4")
    assert _backend.thread_count() == 4
    four = _all_kernels(None)
    for key in one:
        left, right = one[key], four[key]
        if isinstance(left, tuple):
            assert all(np.array_equal(x, y) for x, y in zip(left, right))
        else:
            assert np.array_equal(left, right)


def test_bad_thread_setting_falls_back(monkeypatch):
    monkeypatch.setenv("HQMAP_THREADS", "lots")
    assert _backend.thread_count() == 1


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.backend_module("fortran")
