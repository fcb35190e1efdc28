import math

import numpy as np
import pytest

from vorwave import oracles as O
from vorwave.dispersion import dirichlet_eigenvalues, find_roots, sigma_eval, sigma_tau_identity
from vorwave.errors import AmplitudeError, SolvabilityError
from vorwave.linear_wave import (
    first_order_field,
    fit_blowup,
    fit_large_s,
    harmonic_resonances,
    sigma_star_eval,
    sigma_star_s_derivative,
    solve_kernel,
    trace_tau_curve,
    vertical_sign_changes,
)
from vorwave.stream import build_stream_solution, h_derivative
from vorwave.vorticity import make_spec


@pytest.fixture(scope="module")
def lin():
    spec = make_spec({"kind": "linear", "b": 1.0})
    st = build_stream_solution(spec, 2.0, "0-")
    return st, find_roots(st).roots[0].tau0


@pytest.mark.parametrize("h, tau", [(1.2, 1.3), (3.0, 9.0), (2.0, 0.4)])
def test_irrotational_kernel_closed_form(zero_spec, h, tau):
    st = build_stream_solution(zero_spec, 1 / h, "0+")
    ker = solve_kernel(st, tau)
    z = ker.z
    ref = z / h ** 2 - np.sinh(tau * z) / (h * np.sinh(tau * h))
    np.testing.assert_allclose(ker.W, ref, atol=1e-10)


def test_kernel_large_tau_h_stays_bounded(zero_spec):
    st = build_stream_solution(zero_spec, 1 / 3.0, "0+")
    ker = solve_kernel(st, 40.0)
    assert np.all(np.isfinite(ker.W))
    assert ker.residual == pytest.approx(abs(sigma_eval(st, 40.0)), abs=1e-8)


def test_kernel_at_root(lin):
    st, t0 = lin
    ker = solve_kernel(st, t0)
    assert ker.residual <= 1e-10
    assert ker.W[0] == 0.0 and ker.W[-1] == 0.0


def test_kernel_at_pole_is_singular(lin):
    st, _ = lin
    (p,) = dirichlet_eigenvalues(st)
    with pytest.raises(SolvabilityError):
        solve_kernel(st, float(p))


def test_kernel_satisfies_ode(lin):
    st, t0 = lin
    ker = solve_kernel(st, t0, n_samples=2049)
    z, W = ker.z, ker.W
    dz = z[1] - z[0]
    Wzz = (W[2:] - 2 * W[1:-1] + W[:-2]) / dz ** 2
    U = np.interp(z, st.Y, st.U)
    Up = np.interp(z, st.Y, st.Up)
    spec = st.spec
    rhs = (z * Up * t0 ** 2 + 2 * spec.omega(U)) / st.h
    res = -Wzz + (t0 ** 2 - spec.omega_prime(U[1:-1])) * W[1:-1] - rhs[1:-1]
    assert np.max(np.abs(res)) <= 1e-3


def test_field_defect_is_second_order(lin):
    st, t0 = lin
    d1 = first_order_field(st, t0, 0.02).bernoulli_defect
    d2 = first_order_field(st, t0, 0.01).bernoulli_defect
    assert d1 / d2 == pytest.approx(4.0, rel=0.05)
    f0 = first_order_field(st, t0, 0.0)
    assert f0.bernoulli_defect <= 1e-9
    assert f0.symmetry_defect == 0.0


def test_field_amplitude_bound(lin):
    st, t0 = lin
    with pytest.raises(AmplitudeError):
        first_order_field(st, t0, 0.06 * st.h)


def test_critical_layer_on_constant_1plus(const2):
    st = build_stream_solution(const2, 2.5, "1+")
    t0 = find_roots(st).roots[0].tau0
    f = first_order_field(st, t0, 1e-3)
    assert vertical_sign_changes(f) == 1


def test_unidirectional_field_has_no_critical_layer(const2):
    st = build_stream_solution(const2, 2.02, "0+")
    t0 = find_roots(st).roots[0].tau0
    assert vertical_sign_changes(first_order_field(st, t0, 1e-3)) == 0


def test_harmonic_resonance_detection():
    class P:
        roots = [type("R", (), {"tau0": 0.5})(), type("R", (), {"tau0": 1.5})()]
    assert harmonic_resonances(P()) == [(3, 0.5)]


@pytest.mark.parametrize("s, tau", [(0.8, 1.0), (0.5, 2.5), (1.3, 0.7)])
def test_sigma_star_derivative_irrotational(zero_spec, s, tau):
    q = tau / s
    ref = tau / math.tanh(q) + tau * tau / s / math.sinh(q) ** 2 + 1 / s ** 2
    assert sigma_star_s_derivative(zero_spec, s, "0+", tau) == pytest.approx(ref, rel=1e-7)


def test_trace_matches_linear_oracle(linear1):
    ss = np.array([1.5, 2.0, 3.0, 6.0])
    c = trace_tau_curve(linear1, "0-", ss, with_derivative=False)
    for s, t in zip(c.s, c.tau):
        assert t == pytest.approx(O.linear_tau_curve(1.0, s), abs=1e-9)


def test_transversality_identity(linear1):
    # dtau/ds = -sigma*_s / sigma*_tau along the curve, against the oracle
    for s in (1.8, 2.6, 5.0):
        t = O.linear_tau_curve(1.0, s)
        d = 1e-5
        fd = (O.linear_tau_curve(1.0, s + d) - O.linear_tau_curve(1.0, s - d)) / (2 * d)
        st = build_stream_solution(linear1, s, "0-")
        _, s_tau = sigma_tau_identity(st, t)
        s_s = sigma_star_s_derivative(linear1, s, "0-", t)
        assert -s_s / s_tau == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_tau_dot_sign_and_stationary(linear1):
    c = trace_tau_curve(linear1, "0-", np.linspace(2.5, 4.0, 4))
    assert set(c.tau_dot_sign) == {-1, 1}
    (p,) = c.stationary
    assert abs(p.sigma_dot) <= 1e-5
    ts = [O.linear_tau_curve(1.0, p.s + e) for e in (-1e-3, 0.0, 1e-3)]
    assert ts[1] <= min(ts[0], ts[2]) or ts[1] >= max(ts[0], ts[2])


def test_fits_recover_synthetic_laws():
    s = np.linspace(20, 100, 9)
    L, a, c = fit_large_s(s, 2.0 - 0.5 / s + 3.0 / s ** 2)
    assert (L, a, c) == pytest.approx((2.0, -0.5, 3.0), rel=1e-10)
    s = np.sqrt(1 + np.geomspace(1e-3, 1e-2, 5))
    assert fit_blowup(s, 3.0 * (s * s - 1) ** -1.0, 1.0) == pytest.approx(-1.0, abs=1e-12)


def test_sigma_star_eval_matches_stream(linear1):
    st = build_stream_solution(linear1, 2.0, "0-")
    assert sigma_star_eval(linear1, 2.0, "0-", 3.0) == pytest.approx(sigma_eval(st, 3.0), rel=1e-12)
