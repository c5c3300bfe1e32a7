import mpmath
import numpy as np
import pytest
from scipy import integrate, optimize

from conftest import ALL_PRESETS, QC_PRESETS, grid, preset_boundary
from hqmap.boundary_kernels import (boundary_jacobian, jacobian_upper_bound, kernel_bound_check, kernel_K,
                                    kernel_KF, kernel_KF_via_curve)
from hqmap.curves import arc_length_reparametrize, circle_modulus
from hqmap.errors import InputError, PreconditionError
from hqmap.harmonic import BoundaryMap, analyze, boundary_from_spec, evaluate
from hqmap.modulus import ModulusOfContinuity

CIRCLE = arc_length_reparametrize({"type": "circle"}, M=1024)
ELLIPSE = arc_length_reparametrize({"type": "ellipse", "a": 2, "b": 1}, M=1024)


def _ellipse_oracle(s):
    """g(s), g'(s) on the (2,1) ellipse by adaptive quadrature of the speed and root finding."""
    speed = lambda th: np.hypot(2 * np.sin(th), np.cos(th))  # noqa: E731
    arc = lambda th: integrate.quad(speed, 0, th, epsabs=1e-13, epsrel=1e-13, limit=200)[0]  # noqa: E731
    th = optimize.brentq(lambda x: arc(x) - s, 0, 2 * np.pi, xtol=1e-15)
    d = complex(-2 * np.sin(th), np.cos(th))
    return complex(2 * np.cos(th), np.sin(th)), d / abs(d)


def test_circle_kernel_closed_form(rng):
    s, t = rng.uniform(0, 2 * np.pi, (2, 50))
    assert np.allclose(kernel_K(CIRCLE, s, t), 1 - np.cos(t - s), atol=1e-13)
    assert np.all(kernel_K(CIRCLE, s, s) == 0)


def test_ellipse_kernel_against_quadrature_oracle():
    l = ELLIPSE.length
    pairs = [(0.1, 2.0), (1.0, 7.5), (3.3, 3.4), (9.0, 0.2)]
    for s, t in pairs:
        gs, dgs = _ellipse_oracle(s % l)
        gt, _ = _ellipse_oracle(t % l)
        expected = (np.conj(gt - gs) * 1j * dgs).real
        assert kernel_K(ELLIPSE, s, t) == pytest.approx(expected, abs=1e-6)


def test_identity_KF_closed_form(rng):
    b = preset_boundary("identity")
    t, tau = rng.uniform(0, 2 * np.pi, (2, 40))
    assert np.allclose(kernel_KF(b, t, tau), 2 * np.sin((t - tau) / 2) ** 2, atol=1e-12)
    assert np.all(np.abs(kernel_KF(b, tau, tau)) < 1e-15)


@pytest.mark.parametrize("name", ["affine", "quadratic", "ellipse", "star"])
def test_cross_route(name, rng):
    b = preset_boundary(name)
    t, tau = rng.uniform(0, 2 * np.pi, (2, 64))
    assert np.abs(kernel_KF(b, t, tau) - kernel_KF_via_curve(b, t, tau)).max() < 1e-6


def test_kernel_bound_circle_closed_form_modulus():
    rep = kernel_bound_check(CIRCLE, boundary=preset_boundary("circle"))
    assert rep.passed
    assert rep.max_excess <= 1e-3
    assert rep.n_pairs == 64 * 64


def test_kernel_bound_ellipse_empirical_modulus():
    om = ELLIPSE.tangent_modulus()
    assert om.kind == "empirical"
    rep = kernel_bound_check(ELLIPSE, om, boundary=preset_boundary("ellipse"), slack=1e-3)
    assert rep.passed
    assert rep.to_dict()["pullback_max_excess"] <= 1e-3


def test_kernel_bound_on_diagonal_pairs():
    s = np.linspace(0, ELLIPSE.length, 7, endpoint=False)
    rep = kernel_bound_check(ELLIPSE, pairs=np.column_stack([s, s]))
    assert np.all(rep.arc.value == 0) and np.all(rep.arc.bound == 0)
    assert rep.passed


def test_kernel_bound_reports_violation_instead_of_raising():
    rep = kernel_bound_check(ELLIPSE, ModulusOfContinuity.power(1e-3, 1.0))
    assert not rep.passed
    assert rep.max_excess > 0
    s, t = rep.worst_pair
    assert 0 <= s < ELLIPSE.length and 0 <= t < ELLIPSE.length


def test_identity_jacobian_off_grid():
    b = boundary_from_spec({"type": "circle"}, N=2048)
    tau = np.random.default_rng(1).uniform(0, 2 * np.pi, 64)
    res = boundary_jacobian(b, tau)
    assert np.abs(res.J - 1).max() <= 1e-4
    assert res.remainder.shape == (64,)


def test_affine_jacobian():
    b = preset_boundary("affine")
    assert np.abs(boundary_jacobian(b).J - 0.75).max() <= 1e-3
    assert boundary_jacobian(b, 0.3).J == pytest.approx(0.75, abs=1e-3)


def test_quadratic_jacobian_matches_interior_extrapolation():
    b = preset_boundary("quadratic")
    hm = analyze(b)

    def interior_J(r):
        _, fz, fzb = evaluate(hm, r, derivatives=True)
        return abs(fz) ** 2 - abs(fzb) ** 2

    oracle = 2 * interior_J(0.999) - interior_J(0.998)
    assert interior_J(0.999) == pytest.approx(0.7505, abs=1e-4)
    assert boundary_jacobian(b, 0.0).J == pytest.approx(oracle, abs=1e-3)


@pytest.mark.parametrize("name", QC_PRESETS)
def test_jacobian_positive(name):
    assert boundary_jacobian(preset_boundary(name)).J.min() > 0


@pytest.mark.parametrize("name", ["identity", "affine", "quadratic", "ellipse", "star"])
def test_refinement_within_remainder(name):
    from hqmap.presets import expand_preset

    coarse = boundary_jacobian(preset_boundary(name))
    fine = boundary_jacobian(boundary_from_spec(expand_preset(name), N=2048))
    assert np.all(np.abs(fine.J[::2] - coarse.J) <= coarse.remainder)


def test_identity_upper_bound_matches_closed_form_integral():
    # on the circle int_0^rho omega = 8 sin^2(rho/4) with rho = |x|
    with mpmath.workdps(30):
        ref = float(mpmath.pi / 4 * 2 * mpmath.quad(lambda x: 8 * mpmath.sin(x / 4) ** 2 / x ** 2, [0, mpmath.pi]))
    b = preset_boundary("identity")
    ub = jacobian_upper_bound(b, omega=circle_modulus(1.0), phi=np.array([0.0, 1.0, 4.0]))
    assert ref == pytest.approx(2.3064, abs=1e-4)
    assert np.allclose(ub.bound, ref, rtol=1e-9)
    assert ub.holds
    # the sampled modulus sits just below the concave exact one
    emp = jacobian_upper_bound(b, phi=np.array([0.0]))
    assert emp.bound[0] == pytest.approx(ref, rel=1e-5)


def test_upper_bound_with_zero_modulus_flags_nonzero_jacobian():
    ub = jacobian_upper_bound(preset_boundary("identity"), omega=ModulusOfContinuity.power(0.0, 1.0),
                              phi=np.array([0.5]))
    assert ub.bound[0] == 0.0
    assert not ub.holds
    assert ub.ratio[0] == np.inf


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_jacobian_below_upper_bound(name):
    b = preset_boundary(name)
    assert jacobian_upper_bound(b, jacobian=boundary_jacobian(b).J).holds


def test_non_lipschitz_data_is_a_precondition_error():
    b = preset_boundary("identity")
    d = b.derivative.copy()
    d[3] = np.inf
    bad = BoundaryMap(b.values, d, b.target, b.correspondence)
    with pytest.raises(PreconditionError):
        boundary_jacobian(bad)


def test_jacobian_needs_enough_samples():
    b = BoundaryMap.from_trig({1: 1.0}, N=32, M=64)
    with pytest.raises(InputError):
        boundary_jacobian(b)


def test_backends_agree_for_jacobian():
    b = preset_boundary("quadratic")
    a = boundary_jacobian(b, backend="python").J
    c = boundary_jacobian(b).J
    assert np.allclose(a, c, atol=1e-13)


def test_grid_and_shifted_routes_agree():
    b = preset_boundary("ellipse")
    full = boundary_jacobian(b)
    picked = boundary_jacobian(b, grid(1024)[[0, 100, 517]])
    assert np.allclose(picked.J, full.J[[0, 100, 517]], atol=1e-10)
