import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import grid, random_trig
from hqmap.errors import InputError, PreconditionError
from hqmap.hilbert import (CircleFunction, conjugate_identity_check, hilbert_pv, hilbert_spectral,
                           privalov_report)
from hqmap.modulus import ModulusOfContinuity

T = grid(4096)


@pytest.mark.parametrize("route", [hilbert_spectral, hilbert_pv])
def test_cos_to_sin_and_sin_to_minus_cos(route):
    assert np.abs(route(np.cos(T)) - np.sin(T)).max() < 1e-3
    assert np.abs(route(np.sin(T)) + np.cos(T)).max() < 1e-3


@pytest.mark.parametrize("route", [hilbert_spectral, hilbert_pv])
def test_constant_maps_to_zero(route):
    assert np.all(route(np.full(256, 7.0)) == 0.0)


@pytest.mark.parametrize("n", [1, 3, 17])
def test_exponential_multiplier(n):
    t = grid(512)
    for route in (hilbert_spectral, hilbert_pv):
        assert np.abs(route(np.exp(1j * n * t)) + 1j * np.exp(1j * n * t)).max() < 1e-10
        assert np.abs(route(np.exp(-1j * n * t)) - 1j * np.exp(-1j * n * t)).max() < 1e-10


def test_pv_equals_spectral_on_grid(rng):
    v = random_trig(rng, 32, 1024, real=True)
    assert np.abs(hilbert_pv(v) - hilbert_spectral(v)).max() < 1e-10


def test_pv_error_estimate_is_small_for_smooth_data():
    _, err = hilbert_pv(np.cos(T), return_error=True)
    assert err.max() < 1e-10


def test_pv_error_estimate_flags_rough_data():
    v = np.sign(np.sin(T))
    out, err = hilbert_pv(v, return_error=True)
    assert err.max() > 1e-3
    assert np.all(np.isfinite(out))


def test_pv_needs_enough_samples():
    with pytest.raises(InputError):
        hilbert_pv(np.ones(64))
    with pytest.raises(InputError):
        hilbert_spectral(np.ones(100))


def test_involution(rng):
    v = random_trig(rng, 20, 512, real=True)
    hh = hilbert_spectral(hilbert_spectral(v))
    assert np.abs(hh + v - v.mean()).max() < 1e-12


def test_rotation_commutes_exactly(rng):
    v = random_trig(rng, 12, 256, real=True)
    for route in (hilbert_spectral, hilbert_pv):
        assert np.abs(route(np.roll(v, 5)) - np.roll(route(v), 5)).max() < 1e-13


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2 ** 32 - 1))
def test_linearity(a, b, seed):
    r = np.random.default_rng(seed)
    u, v = random_trig(r, 6, 128, real=True), random_trig(r, 6, 128, real=True)
    for route in (hilbert_spectral, hilbert_pv):
        assert np.allclose(route(a * u + b * v), a * route(u) + b * route(v), atol=1e-11)


def test_conjugate_identity_cos():
    assert conjugate_identity_check(np.cos(grid(1024))) <= 1e-10


def test_conjugate_identity_constant():
    assert conjugate_identity_check(np.full(256, 2.0)) == 0.0


def test_conjugate_identity_random(rng):
    assert conjugate_identity_check(random_trig(rng, 16, 1024, real=True)) <= 1e-8


def test_circle_function_wrapper():
    f = CircleFunction.from_function(np.cos, 256)
    assert f.N == 256
    assert np.allclose(hilbert_spectral(f), np.sin(f.grid))
    assert np.asarray(f).shape == (256,)
    with pytest.raises(InputError):
        CircleFunction(np.ones(100))


def _min_modulus():
    return ModulusOfContinuity.closed_form(lambda t: np.minimum(np.asarray(t, float), 2.0), None, name="min(t,2)")


def test_privalov_cosine():
    rep = privalov_report(np.cos(grid(1024)), _min_modulus())
    assert rep.passed
    assert all(np.isfinite([rep.A, rep.B, rep.C]))
    assert np.all(rep.lhs <= rep.rhs * (1 + 1e-9) + 1e-15)


def test_privalov_constant_derivative():
    rep = privalov_report(np.full(512, 1.0), _min_modulus())
    assert (rep.A, rep.B, rep.C) == (0.0, 0.0, 0.0)
    assert rep.passed and np.all(rep.lhs == 0)


def test_privalov_refinement_stability():
    om = ModulusOfContinuity.power(1.0, 0.5)
    reps = [privalov_report(np.abs(np.sin(grid(n))) ** 0.5, om) for n in (1024, 2048)]
    for name in ("A", "B", "C"):
        a, b = getattr(reps[0], name), getattr(reps[1], name)
        assert abs(a - b) <= 0.1 * max(abs(a), abs(b)) + 1e-12


def test_privalov_precondition():
    with pytest.raises(PreconditionError):
        privalov_report(5 * np.cos(grid(512)), _min_modulus())


def test_privalov_pv_route_agrees():
    om = _min_modulus()
    a = privalov_report(np.cos(grid(512)), om)
    b = privalov_report(np.cos(grid(512)), om, method="pv")
    assert np.allclose(a.lhs, b.lhs, atol=1e-10)
