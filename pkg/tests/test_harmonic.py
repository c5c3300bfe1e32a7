import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import grid, random_trig
from hqmap.errors import DomainError, InputError, PrecisionWarning
from hqmap.harmonic import (analyze, boundary_from_spec, evaluate, harmonic_conjugate,
                            parseval_defect, poisson_error_bound, poisson_quadrature, radial_tangential)

T = grid(1024)


def affine(a=0.5, n=1024):
    t = grid(n)
    return np.exp(1j * t) + a * np.exp(-1j * t)


def test_identity_coefficients():
    hm = analyze(np.exp(1j * T))
    expected = np.zeros(hm.analytic_part.size, complex)
    expected[1] = 1
    assert np.allclose(hm.analytic_part, expected, atol=1e-14)
    assert np.allclose(hm.coanalytic_part, 0, atol=1e-14)


def test_affine_split():
    hm = analyze(affine())
    assert hm.analytic_part[1] == pytest.approx(1.0, abs=1e-14)
    assert hm.coanalytic_part[0] == pytest.approx(0.5, abs=1e-14)
    assert np.abs(hm.analytic_part[2:]).max() < 1e-14


def test_quadratic_split():
    hm = analyze(np.exp(1j * T) + 0.25 * np.exp(-2j * T))
    assert hm.analytic_part[1] == pytest.approx(1.0, abs=1e-14)
    assert hm.coanalytic_part[1] == pytest.approx(0.25, abs=1e-14)
    assert abs(hm.coanalytic_part[0]) < 1e-14


def test_nyquist_mode_is_split_evenly():
    n = 64
    t = grid(n)
    hm = analyze(np.cos(n // 2 * t).astype(complex))
    # cos(N t/2) = (z^{N/2} + conj z^{N/2}) / 2 on the grid
    assert hm.analytic_part[-1] == pytest.approx(0.5)
    assert hm.coanalytic_part[-1] == pytest.approx(0.5)


def test_non_power_of_two_rejected():
    with pytest.raises(InputError):
        analyze(np.ones(100, complex))
    with pytest.raises(InputError):
        analyze(np.ones(32, complex))


def test_evaluate_monomials():
    for n in range(0, 6):
        hm = analyze(np.exp(1j * n * T))
        assert evaluate(hm, 0.5) == pytest.approx(0.5 ** n, abs=1e-14)


def test_evaluate_constant():
    f, fz, fzb = evaluate(analyze(np.ones(1024, complex)), np.array([0.3, 0.9j]), derivatives=True)
    assert np.allclose(f, 1)
    assert np.allclose(fz, 0) and np.allclose(fzb, 0)


def test_evaluate_affine_closed_form():
    z = 0.3 + 0.4j
    f, fz, fzb = evaluate(analyze(affine()), z, derivatives=True)
    assert f == pytest.approx(0.45 + 0.2j, abs=1e-14)
    assert fz == pytest.approx(1.0, abs=1e-14)
    assert fzb == pytest.approx(0.5, abs=1e-14)


def test_evaluate_outside_disk_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(analyze(affine()), 1.01)


def test_poisson_constant_and_mean_value():
    assert poisson_quadrature(np.full(256, 2.5 + 1j), np.array([0.1, 0.5j, -0.7])) == pytest.approx(2.5 + 1j)
    assert abs(poisson_quadrature(np.cos(grid(256)).astype(complex), 0.0)) < 1e-15


def test_poisson_matches_spectral_affine():
    z = 0.5
    assert poisson_quadrature(affine(), z) == pytest.approx(complex(evaluate(analyze(affine()), z)), abs=1e-8)


def test_poisson_warns_near_circle():
    v = affine(n=64)
    with pytest.warns(PrecisionWarning) as rec:
        _, bound = poisson_quadrature(v, 0.99, return_bound=True)
    assert rec[0].message.bound == pytest.approx(float(bound))
    with pytest.raises(DomainError):
        poisson_quadrature(v, 1.0)


def test_poisson_bound_is_honest(rng):
    v = random_trig(rng, 30, 64)
    hm = analyze(v)
    z = 0.8 * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        pq = poisson_quadrature(v, z)
    assert np.all(np.abs(pq - evaluate(hm, z)) <= poisson_error_bound(v, 0.8) + 1e-13)


def test_parseval(rng):
    v = random_trig(rng, 40, 256)
    assert parseval_defect(analyze(v), v) < 1e-12


def test_harmonicity_by_five_point_laplacian(rng):
    hm = analyze(random_trig(rng, 8, 256))
    h = 1e-3
    z = 0.5 * np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
    lap = (evaluate(hm, z + h) + evaluate(hm, z - h) + evaluate(hm, z + 1j * h) + evaluate(hm, z - 1j * h)
           - 4 * evaluate(hm, z)) / h ** 2
    assert np.abs(lap).max() < 1e-4


def test_radial_tangential_identity_and_conjugate():
    dr, dt = radial_tangential(analyze(np.exp(1j * T)), 0.5)
    assert dr == pytest.approx(1.0) and dt == pytest.approx(0.5j)
    dr, dt = radial_tangential(analyze(np.exp(-1j * T)), 0.5)
    assert dr == pytest.approx(1.0) and dt == pytest.approx(-0.5j)


def test_radial_derivative_at_origin_warns():
    with pytest.warns(PrecisionWarning):
        dr, _ = radial_tangential(analyze(affine()), 0.0)
    assert dr == pytest.approx(1.5)


def test_boundary_tangential_derivative_matches_samples():
    b = boundary_from_spec({"type": "trig", "coeffs": [[1, 1, 0], [-2, 0.25, 0]]}, N=256)
    hm = analyze(b)
    assert np.abs(hm.boundary_derivative(b.angles) - b.derivative).max() < 1e-8


def test_maximum_principle_for_tangential_derivative(rng):
    hm = analyze(random_trig(rng, 6, 256))
    interior = np.multiply.outer([0.3, 0.6, 0.9, 0.99], np.exp(1j * grid(128)))
    _, dt = radial_tangential(hm, interior)
    assert np.abs(dt).max() <= np.abs(hm.boundary_derivative(grid(1024))).max() + 1e-10


def test_conjugate_vanishes_at_origin_and_matches_closed_form():
    hm = analyze(np.cos(T).astype(complex))
    z = np.array([0.0, 0.3 + 0.2j, -0.5j])
    # conjugate of Re z is Im z
    assert np.allclose(harmonic_conjugate(hm, z), z.imag, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_extension_is_linear(a, b, seed):
    r = np.random.default_rng(seed)
    u, v = random_trig(r, 5, 64), random_trig(r, 5, 64)
    z = np.array([0.2, 0.5j, -0.7 + 0.1j])
    lhs = evaluate(analyze(a * u + b * v), z)
    rhs = a * evaluate(analyze(u), z) + b * evaluate(analyze(v), z)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_boundary_from_trig_spec_correspondence():
    b = boundary_from_spec({"type": "trig", "coeffs": [[1, 1, 0], [-1, 0.5, 0]]}, N=128, M=256)
    assert b.projection_error() < 1e-10
    assert np.all(np.diff(b.correspondence) > 0)
    assert b.target.length == pytest.approx(b.psi_at(2 * np.pi) - b.psi_at(0.0), rel=1e-12)


def test_boundary_from_samples_on_circle():
    v = np.exp(1j * (grid(256) - np.sin(grid(256))))
    b = boundary_from_spec({"type": "samples", "values": np.column_stack([v.real, v.imag]).tolist(),
                            "curve": {"type": "circle"}})
    assert b.projection_error() < 1e-12
    assert b.psi_table_at(np.array([0.0, 2 * np.pi])) == pytest.approx([0.0, 2 * np.pi], abs=1e-12)


def test_reversed_boundary_is_rejected():
    with pytest.raises(InputError):
        boundary_from_spec({"type": "trig", "coeffs": [[-1, 1, 0]]}, N=64)


def test_composed_spec_arclength_correspondence():
    spec = {"type": "composed", "curve": {"type": "ellipse", "a": 2, "b": 1}, "correspondence": "sampled"}
    b = boundary_from_spec(spec, N=128)
    assert np.allclose(b.speed, b.target.length / (2 * np.pi), rtol=1e-10)
    with pytest.raises(InputError):
        boundary_from_spec({**spec, "correspondence": "bogus"}, N=128)
