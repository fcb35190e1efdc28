import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from vorwave import kernels as K
from vorwave.errors import ConfigurationError
from vorwave.vorticity import compute_s0, make_spec

DESCRIPTORS = [
    {"kind": "zero"},
    {"kind": "constant", "b": 2.0},
    {"kind": "linear", "b": 1.0},
    {"kind": "polynomial", "coeffs": [0.0, 1.0, -1.0]},
    {"kind": "polynomial", "coeffs": [0.3, -0.2, 0.5, 0.1]},
    {"kind": "tabulated", "grid": np.linspace(-1, 2, 13).tolist(),
     "values": np.sin(np.linspace(-1, 2, 13)).tolist()},
]


def test_constant_b2():
    sp = make_spec({"kind": "constant", "b": 2})
    assert sp.omega(0.3) == 2.0
    assert sp.Omega(0.7) == pytest.approx(1.4, abs=1e-15)
    assert sp.Omega(1.0) == pytest.approx(2.0, abs=1e-15)


def test_linear_b1():
    sp = make_spec({"kind": "linear", "b": 1})
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(sp.omega(t), t)
    np.testing.assert_allclose(sp.Omega(t), t ** 2 / 2, atol=1e-15)
    assert sp.lipschitz_bound == 1.0


def test_zero():
    sp = make_spec({"kind": "zero"})
    assert sp.omega(0.5) == 0.0
    assert compute_s0(sp)[0] == 0.0


@pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d["kind"])
def test_primitive_vanishes_at_zero(desc):
    assert make_spec(desc).Omega(0.0) == 0.0


@pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d["kind"])
def test_midpoint_consistency(desc):
    sp = make_spec(desc)
    t = np.linspace(-0.9, 1.9, 57)
    for d in (1e-1, 5e-2, 2.5e-2):
        defect = np.abs(sp.Omega(t + d) - sp.Omega(t) - d * sp.omega(t + d / 2))
        assert defect.max() <= 0.5 * d ** 3


@pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d["kind"])
def test_primitive_derivative(desc):
    sp = make_spec(desc)
    t = np.linspace(-0.8, 1.8, 41)
    d = 1e-6
    fd = (sp.Omega(t + d) - sp.Omega(t - d)) / (2 * d)
    w = sp.omega(t)
    assert np.all(np.abs(fd - w) <= 1e-8 * np.maximum(1.0, np.abs(w)))


@pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d["kind"])
def test_omega_prime_is_derivative(desc):
    sp = make_spec(desc)
    t = np.linspace(-0.8, 1.8, 41)
    d = 1e-6
    fd = (sp.omega(t + d) - sp.omega(t - d)) / (2 * d)
    np.testing.assert_allclose(sp.omega_prime(t), fd, atol=1e-7)


@pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d["kind"])
def test_kernel_evaluator_matches_numpy(desc):
    sp = make_spec(desc)
    for t in np.linspace(-3.0, 4.0, 71):
        w, wp = K.vort_eval(sp.code, sp.coef, sp.knots, float(t))
        assert w == pytest.approx(float(sp.omega(t)), rel=1e-13, abs=1e-13)
        assert wp == pytest.approx(float(sp.omega_prime(t)), rel=1e-13, abs=1e-13)


def test_tabulated_matches_scipy_inside_grid():
    grid = np.linspace(-0.5, 1.5, 9)
    vals = np.exp(grid)
    sp = make_spec({"kind": "tabulated", "grid": grid, "values": vals})
    ref = CubicSpline(grid, vals)
    t = np.linspace(-0.5, 1.5, 31)
    np.testing.assert_allclose(sp.omega(t), ref(t), rtol=1e-14)
    anti = ref.antiderivative()
    np.testing.assert_allclose(sp.Omega(t), anti(t) - anti(0.0), atol=1e-14)


def test_tabulated_extrapolates_linearly():
    grid = np.linspace(0.0, 1.0, 6)
    sp = make_spec({"kind": "tabulated", "grid": grid, "values": grid ** 2})
    slope = float(sp.omega_prime(1.0))
    assert sp.omega(1.5) == pytest.approx(float(sp.omega(1.0)) + 0.5 * slope, rel=1e-14)
    assert sp.extrapolates(-0.1, 0.5)
    assert not sp.extrapolates(0.0, 1.0)


@pytest.mark.parametrize("desc, field", [
    ({"kind": "spiral"}, "kind"),
    ({"kind": "constant"}, "b"),
    ({"kind": "linear", "b": "x"}, "b"),
    ({"kind": "linear", "b": 1, "c": 2}, "c"),
    ({"kind": "tabulated", "grid": [0, 1, 0.5, 2], "values": [0, 0, 0, 0]}, "grid"),
    ({"kind": "tabulated", "grid": [0, 1, 2], "values": [0, 0, 0]}, "4 grid points"),
    ({"kind": "tabulated", "grid": [0.1, 0.5, 1, 2], "values": [0, 0, 0, 0]}, "cover"),
    ({"kind": "polynomial", "coeffs": []}, "coeffs"),
])
def test_malformed_descriptor_names_field(desc, field):
    with pytest.raises(ConfigurationError, match=field):
        make_spec(desc)


def test_s0_constant():
    assert compute_s0(make_spec({"kind": "constant", "b": 2}))[0] == pytest.approx(2.0, abs=1e-14)


def test_s0_linear():
    assert compute_s0(make_spec({"kind": "linear", "b": 1}))[0] == pytest.approx(1.0, abs=1e-14)


def test_s0_quadratic_bruteforce():
    sp = make_spec({"kind": "polynomial", "coeffs": [0.0, 1.0, -1.0]})
    t = np.linspace(0.0, 1.0, 100001)
    brute = math.sqrt(2.0 * np.max(t ** 2 / 2 - t ** 3 / 3))
    assert compute_s0(sp)[0] == pytest.approx(brute, abs=1e-12)
    assert brute == pytest.approx(math.sqrt(1.0 / 3.0), abs=1e-14)


@pytest.mark.parametrize("desc", [
    {"kind": "polynomial", "coeffs": [1.0, -4.0, 1.0]},
    {"kind": "polynomial", "coeffs": [-0.2, 3.0, -4.0]},
    {"kind": "tabulated", "grid": np.linspace(0, 1, 11).tolist(),
     "values": np.cos(6 * np.linspace(0, 1, 11)).tolist()},
])
def test_s0_dominates_grid(desc):
    sp = make_spec(desc)
    s0, tmax = compute_s0(sp)
    t = np.linspace(0.0, 1.0, 10001)
    assert np.all(s0 * s0 >= 2 * sp.Omega(t) - 1e-12)
    assert abs(s0 * s0 - max(2 * float(sp.Omega(tmax)), 0.0)) <= 1e-10
