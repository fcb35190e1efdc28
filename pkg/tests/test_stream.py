import math

import numpy as np
import pytest

from vorwave import oracles as O
from vorwave.errors import BranchUnavailableError, ConfigurationError, DomainError
from vorwave.stream import (
    Branch,
    bernoulli_R,
    build_stream_solution,
    classify_counter_currents,
    critical_values,
    depth_sequences,
    first_integral_residual,
    h_derivative,
    integrate_cauchy,
    parse_branch,
    r_curve,
    solve_bernoulli_for_s,
    solve_s_for_depth,
    tau_bounds,
    y_bounds,
)
from vorwave.vorticity import compute_s0, make_spec


def test_parse_branch():
    assert parse_branch("0+") == Branch(0, 1)
    assert parse_branch("3-") == Branch(3, -1)
    assert str(Branch(2, -1)) == "2-"
    assert Branch(1, 1).layers == 2 and Branch(1, -1).layers == 3
    for bad in ("+", "x-", "1", "-1+", 2):
        with pytest.raises(ConfigurationError):
            parse_branch(bad)


def test_first_integral_along_cauchy(linear1):
    for sign in (1, -1):
        tr = integrate_cauchy(linear1, 1.7, sign, 20.0)
        assert first_integral_residual(tr, linear1, 1.7) <= 1e-8


def test_cauchy_rejects_bad_extent(linear1):
    with pytest.raises(ConfigurationError):
        integrate_cauchy(linear1, 1.5, 1, math.inf)


def test_s_below_s0_is_domain_error(const2):
    with pytest.raises(DomainError):
        depth_sequences(const2, 1.9)


def test_linear_turning_points(linear1):
    tm, tp = tau_bounds(linear1, 2.0)
    assert tp == pytest.approx(2.0, abs=1e-13)
    assert tm == pytest.approx(-2.0, abs=1e-13)
    ym, yp = y_bounds(linear1, 2.0)
    assert yp == pytest.approx(math.pi / 2, abs=1e-9)
    assert ym == pytest.approx(-math.pi / 2, abs=1e-9)


def test_zero_vorticity_has_no_turning_points(zero_spec):
    assert tau_bounds(zero_spec, 0.7) == (-math.inf, math.inf)
    cat = depth_sequences(zero_spec, 0.7, j_max=3)
    assert cat.h0 == pytest.approx(1 / 0.7, rel=1e-12)
    assert all(math.isinf(h) for h in cat.depths_plus[1:] + cat.depths_minus)
    assert "turning-point-beyond-scan-cap" in cat.flags
    assert "turning-point-beyond-scan-cap" in build_stream_solution(zero_spec, 0.7, "0+").flags


@pytest.mark.parametrize("b", [0.5, 2.0])
@pytest.mark.parametrize("ds", [0.01, 0.4, 3.0])
def test_constant_depths_and_heads(b, ds):
    spec = make_spec({"kind": "constant", "b": b})
    s = math.sqrt(2 * b) + ds
    orc = O.constant_vorticity_oracle(b, s)
    cat = depth_sequences(spec, s, j_max=2)
    assert cat.depths_plus[0] == pytest.approx(orc["h0"], abs=1e-8)
    assert cat.depths_plus[1] == pytest.approx(orc["h1"], abs=1e-8)
    assert bernoulli_R(spec, s, "0+") == pytest.approx(orc["R0"], abs=1e-8)
    assert bernoulli_R(spec, s, "1+") == pytest.approx(orc["R1"], abs=1e-8)
    with pytest.raises(BranchUnavailableError):
        bernoulli_R(spec, s, "0-")


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_linear_depths_and_heads(b):
    spec = make_spec({"kind": "linear", "b": b})
    for s in (math.sqrt(b) + 0.05, 1.3 * math.sqrt(b) + 0.5, 6.0):
        cat = depth_sequences(spec, s, j_max=5)
        for j in range(6):
            for sg in (1, -1):
                br = Branch(j, sg)
                assert cat.depth(br) == pytest.approx(O.linear_depth(b, s, j, sg), abs=1e-8)
                assert bernoulli_R(spec, s, br) == pytest.approx(O.linear_R(b, s, j, sg), abs=1e-8)


def _random_cases(n=20, seed=4):
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        k = rng.integers(4)
        if k == 0:
            desc = {"kind": "linear", "b": float(rng.uniform(0.2, 4.0))}
        elif k == 1:
            desc = {"kind": "constant", "b": float(rng.uniform(0.2, 4.0))}
        elif k == 2:
            desc = {"kind": "polynomial",
                    "coeffs": [float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.5, 3.0)),
                               float(rng.uniform(-0.2, 0.2))]}
        else:
            g = np.linspace(-3.0, 3.0, 25)
            a = float(rng.uniform(0.5, 2.0))
            desc = {"kind": "tabulated", "grid": g.tolist(), "values": (a * np.sin(g)).tolist()}
        spec = make_spec(desc)
        s0, _ = compute_s0(spec)
        cases.append((spec, s0 + float(rng.uniform(0.05, 2.0))))
    return cases


@pytest.mark.parametrize("case", range(20))
def test_depths_hit_surface_under_direct_integration(case):
    spec, s = _random_cases()[case]
    cat = depth_sequences(spec, s, j_max=4)
    checked = 0
    for sign, seq in ((1, cat.depths_plus), (-1, cat.depths_minus)):
        for h in seq:
            if not math.isfinite(h) or h > 200:
                continue
            tr = integrate_cauchy(spec, s, sign, h, n_samples=2)
            assert abs(tr.U[-1] - 1.0) <= 1e-7
            checked += 1
    assert checked >= 1


def test_linear_critical_values(linear1):
    cv = critical_values(linear1)
    assert cv.s0 == pytest.approx(1.0, abs=1e-14)
    assert cv.s_c == pytest.approx(O.linear_s_c(1.0), abs=1e-9)
    assert cv.r0_finite and cv.r0 == pytest.approx(math.pi / 3, abs=1e-8)
    assert cv.r_c == pytest.approx(O.linear_R(1.0, cv.s_c, 0, 1), abs=1e-10)


def test_constant_critical_values(const2):
    cv = critical_values(const2)
    assert cv.s0 == pytest.approx(2.0, abs=1e-14)
    assert cv.s_c == pytest.approx(O.constant_s_c(2.0), abs=1e-9)
    assert cv.s_c == pytest.approx(2.0399, abs=5e-5)
    assert cv.r0 == pytest.approx(2 / 3, abs=1e-8)


def test_zero_vorticity_critical_values(zero_spec):
    cv = critical_values(zero_spec)
    assert cv.s_c == pytest.approx(1.0, abs=1e-9)
    assert cv.r_c == pytest.approx(1.0, abs=1e-12)
    assert cv.r0 == math.inf and not cv.r0_finite


@pytest.mark.parametrize("desc", [{"kind": "constant", "b": 2.0}, {"kind": "linear", "b": 1.0},
                                  {"kind": "polynomial", "coeffs": [0.0, 1.0, -1.0]}])
def test_R0_plus_shape(desc):
    spec = make_spec(desc)
    cv = critical_values(spec)
    left = np.linspace(cv.s0 + 1e-3, cv.s_c - 1e-3, 25)
    right = np.linspace(cv.s_c + 1e-3, cv.s_c + 5, 25)
    assert np.all(np.diff(r_curve(spec, "0+", left)) < 0)
    assert np.all(np.diff(r_curve(spec, "0+", right)) > 0)


@pytest.mark.parametrize("desc, branch, s", [
    ({"kind": "linear", "b": 1.0}, "0+", 1.5),
    ({"kind": "linear", "b": 1.0}, "1-", 3.0),
    ({"kind": "constant", "b": 2.0}, "1+", 2.3),
    ({"kind": "polynomial", "coeffs": [0.1, 1.5, -0.1]}, "2+", 2.0),
])
def test_hdot_variational_matches_finite_difference(desc, branch, s):
    h_derivative(make_spec(desc), s, branch, check=True)


def test_hdot_constant_oracle():
    b, s = 2.0, 2.6
    spec = make_spec({"kind": "constant", "b": b})
    orc = O.constant_vorticity_oracle(b, s)
    assert h_derivative(spec, s, "0+") == pytest.approx(orc["hdot0"], rel=1e-9)
    assert h_derivative(spec, s, "1+") == pytest.approx(orc["hdot1"], rel=1e-9)


def test_solve_bernoulli_for_s_roundtrip(const2):
    cv = critical_values(const2)
    r = cv.r_c + 0.05
    sols = solve_bernoulli_for_s(const2, r, "0+")
    assert len(sols) == 2
    assert sols[0] < cv.s_c < sols[1]
    for s in sols:
        assert bernoulli_R(const2, s, "0+") == pytest.approx(r, abs=1e-12)


def test_solve_s_for_depth_linear():
    spec = make_spec({"kind": "linear", "b": 1.0})
    (s,) = solve_s_for_depth(spec, "0-", 7 * math.pi / 6)
    assert s == pytest.approx(2.0, abs=1e-10)


def test_constant_1plus_near_surface_countercurrent(const2):
    sol = build_stream_solution(const2, 2.5, "1+")
    assert classify_counter_currents(sol) == (2, 1, -1)


def test_linear_0minus_near_bottom_countercurrent(linear1):
    sol = build_stream_solution(linear1, 2.0, "0-")
    layers, nb, ns = classify_counter_currents(sol)
    assert layers == 2 and nb == -1 and ns == 1


def test_unidirectional_subcritical(linear1):
    cv = critical_values(linear1)
    sol = build_stream_solution(linear1, 0.5 * (cv.s0 + cv.s_c), "0+")
    assert classify_counter_currents(sol) == (1, 1, 1)
    assert np.all(sol.Up > 0)


def test_stream_invariants(linear1):
    sol = build_stream_solution(linear1, 2.0, "0-")
    assert sol.h == pytest.approx(7 * math.pi / 6, abs=1e-12)
    assert sol.U[-1] == pytest.approx(1.0, abs=1e-10)
    assert sol.kappa ** 2 == pytest.approx(3 * sol.r - 2 * sol.h, abs=1e-10)
    assert sol.kappa == pytest.approx(-2.0 * math.cos(7 * math.pi / 6), abs=1e-12)
