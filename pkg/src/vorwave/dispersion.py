"""The dispersion function sigma(tau) of a stream solution and its roots.

For a stream with depth h and surface slope kappa = U'(h),

    sigma(tau) = kappa * v'(h) / v(h) - 1/kappa + omega(1),

where v'' = (tau^2 - omega'(U)) v, v(0) = 0, v'(0) = 1. Poles sit at the
positive Dirichlet eigenvalues tau_k (zeros of v(h; tau)); between poles
sigma is monotone with the sign of kappa.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from . import kernels as K
from .errors import (
    ClassificationError,
    ConsistencyError,
    DegenerateError,
    EigenvalueCensusError,
    PoleProximityError,
    SearchError,
)
from .shooting import initial_state, shoot
from .stream import h_derivative
from .tolerances import resolve

POLE_GUARD = 1e-10


def _spectral(stream, tau, tol=None, x_out=None):
    xs = [stream.h] if x_out is None else x_out
    return shoot(stream.spec, initial_state(stream.p), 0.0, xs, tau2=tau * tau,
                 flags=K.FLAG_SPEC, tol=tol)


def sigma_eval(stream, tau, tol=None):
    """sigma(tau) by shooting.

    Raises
    ------
    PoleProximityError
        If |v(h)| < 1e-10 max|v| (``tau`` within roundoff of a pole).
    """
    shot = _spectral(stream, tau, tol)
    st = shot.final
    if abs(st[4]) < POLE_GUARD * shot.vmax:
        raise PoleProximityError(f"tau={tau!r} is too close to a pole", tau=tau)
    k = stream.kappa
    return float(k * st[5] / st[4] - 1.0 / k + stream.spec.omega(1.0))


def v_at_surface(stream, tau, tol=None):
    return float(_spectral(stream, tau, tol).final[4])


def sigma_zero_analytic(stream, hdot=None, tol=None):
    """Closed form of sigma(0) from the depth derivative hdot.

    sigma(0) = -(1 + s/hdot)/kappa = -(3/(2 kappa)) R'/hdot with
    R' = 2(s + hdot)/3; both forms are evaluated and must agree.
    Raises :class:`DegenerateError` when |hdot| < 1e-10 (a zero Dirichlet
    eigenvalue).
    """
    if hdot is None:
        hdot = h_derivative(stream.spec, stream.s, stream.branch, tol, sol=stream)
    if abs(hdot) <= 1e-10:
        raise DegenerateError("dh/ds = 0: sigma(0) is not defined for this stream")
    k, s = stream.kappa, stream.s
    direct = -(1.0 + s / hdot) / k
    dR = 2.0 * (s + hdot) / 3.0
    via_head = -1.5 / k * dR / hdot
    if abs(direct - via_head) > 1e-8 * max(1.0, abs(direct)):
        raise ConsistencyError(f"sigma(0) forms disagree: {direct!r} vs {via_head!r}")
    return direct


def condRh_test(stream, hdot=None, tol=None):
    """True iff (dR/ds)/(dh/ds) > 0, i.e. a root below the first pole."""
    if hdot is None:
        hdot = h_derivative(stream.spec, stream.s, stream.branch, tol, sol=stream)
    dR = 2.0 * (stream.s + hdot) / 3.0
    return bool(dR / hdot > 0.0)


def sigma0_integral(stream, tau, tol=None):
    """(1/h) int_0^h gamma [tau^2 z U' + 2 omega(U)] dz with gamma = v/v(h)."""
    st = _spectral(stream, tau, tol).final
    return float(st[7] / (stream.h * st[4]))


def sigma_tau_identity(stream, tau, tol=None):
    """Return (finite-difference d sigma/d tau, 2 tau kappa int gamma^2)."""
    st = _spectral(stream, tau, tol).final
    rhs = 2.0 * tau * stream.kappa * st[6] / (st[4] * st[4])
    d = 1e-5 * max(1.0, abs(tau))
    fd = (sigma_eval(stream, tau + d, tol) - sigma_eval(stream, tau - d, tol)) / (2 * d)
    return fd, float(rhs)


def pole_scan_limit(stream):
    """sqrt(max omega'(U)) over the stream's range: all poles lie below it."""
    u = np.linspace(float(stream.U.min()), float(stream.U.max()), 4001)
    m = float(np.max(stream.spec.omega_prime(u)))
    return math.sqrt(m) if m > 0 else 0.0


def _nodes_at_zero(stream, tol, n=4097):
    Y = np.linspace(0.0, stream.h, n)[1:]
    shot = _spectral(stream, 0.0, tol, x_out=Y)
    v = shot.states[:-1, 4]
    sg = np.sign(v)
    sg = sg[sg != 0]
    return int(np.count_nonzero(sg[1:] != sg[:-1])) if sg.size else 0


def dirichlet_eigenvalues(stream, tol=None):
    """Positive tau_k with v(h; tau_k) = 0, ascending.

    The count is checked against the number of interior zeros of v(., 0).

    Raises
    ------
    EigenvalueCensusError
    """
    tol = resolve(tol)
    expected = _nodes_at_zero(stream, tol)
    cap = pole_scan_limit(stream)
    if expected == 0:
        return np.zeros(0)
    if cap == 0.0:
        raise EigenvalueCensusError("v(., 0) has nodes but omega' is never positive")
    m = max(64, 32 * (expected + 1))
    for _ in range(4):
        grid = np.linspace(0.0, cap * (1.0 + 1e-9), m + 1)
        vals = np.array([v_at_surface(stream, t, tol) for t in grid])
        idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
        if idx.size == expected:
            break
        m *= 2
    else:
        raise EigenvalueCensusError(
            f"found {idx.size} sign changes of v(h; tau), Sturm count is {expected}")
    roots = []
    for i in idx:
        a, b = grid[i], grid[i + 1]
        if vals[i] == 0.0:
            roots.append(float(a))
            continue
        roots.append(brentq(lambda t: v_at_surface(stream, t, tol), a, b, xtol=1e-14, rtol=1e-15))
    return np.asarray(roots)


@dataclass
class ResidueCheck:
    pole: float
    predicted: float
    measured: float
    rel_error: float
    table: list = field(default_factory=list)


def pole_residue_check(stream, pole, neighbours=None, tol=None):
    """Compare the measured residue of sigma at ``pole`` with
    -kappa [gamma*'(h)]^2 / (2 tau*), gamma* the L2-normalised eigenfunction.

    The measured value uses symmetric pairs tau* +- eps with one Richardson
    step in eps.
    """
    tol = resolve(tol)
    st = _spectral(stream, pole, tol).final
    gp2 = st[5] ** 2 / st[6]
    predicted = -stream.kappa * gp2 / (2.0 * pole)
    gap = pole
    for q in neighbours if neighbours is not None else ():
        if q != pole:
            gap = min(gap, abs(q - pole))
    delta = 0.05 * min(gap, 1.0)
    A = []
    for k in range(1, 5):
        eps = delta * 10.0 ** -k
        try:
            a = 0.5 * eps * (sigma_eval(stream, pole + eps, tol) - sigma_eval(stream, pole - eps, tol))
        except PoleProximityError:
            break
        A.append(a)
    if len(A) < 2:
        raise SearchError("could not evaluate sigma close to the pole")
    rich = [(100.0 * A[k + 1] - A[k]) / 99.0 for k in range(len(A) - 1)]
    diffs = [abs(rich[k + 1] - rich[k]) for k in range(len(rich) - 1)]
    best = rich[0] if not diffs else rich[int(np.argmin(diffs)) + 1]
    rel = abs(best - predicted) / abs(predicted)
    return ResidueCheck(float(pole), float(predicted), float(best), float(rel), rich)


@dataclass
class RootInfo:
    tau0: float
    lambda0: float
    residual: float
    interval: int


@dataclass
class DispersionProfile:
    stream: object
    poles: np.ndarray
    hdot: float
    sigma0: float
    sigma0_shoot: float
    condRh: bool
    predicted: int
    roots: list
    degenerate: bool = False
    flags: list = field(default_factory=list)


def _sgn(x):
    return 1.0 if x > 0 else -1.0 if x < 0 else 0.0


def _sigma_near_pole(stream, pole, side, want, limit, tol):
    """Evaluate sigma on ``side`` of ``pole`` until its sign equals ``want``."""
    d = 1e-9 * max(1.0, pole)
    while d < limit:
        t = pole + side * d
        try:
            val = sigma_eval(stream, t, tol)
        except PoleProximityError:
            d *= 4.0
            continue
        if _sgn(val) == want:
            return t
        d *= 4.0
    return None


def _far_bracket(stream, start, want, tol):
    t = start
    for _ in range(60):
        val = sigma_eval(stream, t, tol)
        if _sgn(val) == want:
            return t
        t *= 2.0
    raise SearchError("sigma does not reach its asymptotic sign")


def find_roots(stream, tol=None, tau_cap=None) -> DispersionProfile:
    """All positive roots of sigma, at most one per inter-pole interval.

    The number found (from measured sign changes) must equal
    (number of poles) + [condRh]; :class:`ClassificationError` otherwise.
    """
    tol = resolve(tol)
    poles = dirichlet_eigenvalues(stream, tol)
    sk = _sgn(stream.kappa)
    flags = []
    degenerate = False
    try:
        hdot = h_derivative(stream.spec, stream.s, stream.branch, tol, sol=stream)
        s0_an = sigma_zero_analytic(stream, hdot)
        cond = condRh_test(stream, hdot)
    except DegenerateError:
        degenerate = True
        hdot, s0_an, cond = 0.0, math.nan, False
        flags.append("degenerate-zero-eigenvalue")
    s0_sh = math.nan
    if not degenerate:
        s0_sh = sigma_eval(stream, 0.0, tol)
        if abs(s0_sh - s0_an) > 1e-6 * max(1.0, abs(s0_an)):
            raise ConsistencyError(f"sigma(0): shooting {s0_sh!r} vs closed form {s0_an!r}")
    predicted = len(poles) + (1 if (cond or degenerate) else 0)
    far = max(50.0 / stream.h if tau_cap is None else tau_cap, 2.0 * (poles[-1] if len(poles) else 0.0))

    edges = [0.0] + list(poles)
    roots = []
    for i, left in enumerate(edges):
        right = poles[i] if i < len(poles) else None
        gap_r = (right - left) if right is not None else max(left, 1.0)
        if i == 0 and not degenerate:
            a = 0.0
            if _sgn(s0_sh) != -sk:
                continue
        else:
            a = _sigma_near_pole(stream, left, 1.0, -sk, 0.5 * gap_r, tol)
            if a is None:
                raise ClassificationError(f"sigma has the wrong sign right of the pole {left!r}")
        if right is not None:
            b = _sigma_near_pole(stream, right, -1.0, sk, 0.5 * (right - left), tol)
            if b is None:
                raise ClassificationError(f"sigma has the wrong sign left of the pole {right!r}")
        else:
            b = _far_bracket(stream, max(far, 2.0 * a, 1e-3), sk, tol)
        t0 = brentq(lambda t: sigma_eval(stream, t, tol), a, b, xtol=1e-14, rtol=1e-15, maxiter=200)
        res = abs(sigma_eval(stream, t0, tol))
        roots.append(RootInfo(float(t0), 2.0 * math.pi / t0, res, i))
    if len(roots) != predicted:
        raise ClassificationError(
            f"found {len(roots)} roots but the pole count and condRh predict {predicted}")
    return DispersionProfile(stream, poles, float(hdot), float(s0_an), float(s0_sh), cond,
                             predicted, roots, degenerate, flags)


@dataclass
class SlopeReport:
    windows: list
    constants: list
    stable: bool
    taus: np.ndarray
    defects: np.ndarray

    @property
    def C(self):
        return max(self.constants)


def asymptotic_slope_check(stream, tol=None, n=8):
    """Check sigma/tau - kappa = O(1/tau).

    C_k = max |sigma - kappa tau| over the doubling windows [T, 2T], [2T, 4T],
    [4T, 8T] with T = 20/h. The bound is stable when the change in C
    contracts under doubling, |C_3 - C_2| <= 0.6 |C_2 - C_1| + 1e-8 max(1, C).
    """
    start = max(20.0 / stream.h, 2.0 * pole_scan_limit(stream), 1.0)
    windows = [(start * 2 ** k, start * 2 ** (k + 1)) for k in range(3)]
    taus = np.concatenate([np.linspace(a, b, n) for a, b in windows])
    d = np.array([abs(sigma_eval(stream, t, tol) - stream.kappa * t) for t in taus])
    cs = [float(d[k * n:(k + 1) * n].max()) for k in range(3)]
    stable = abs(cs[2] - cs[1]) <= 0.6 * abs(cs[1] - cs[0]) + 1e-8 * max(1.0, max(cs))
    return SlopeReport(windows, cs, bool(stable), taus, d)


def sample_sigma(stream, taus, poles=None, tol=None):
    """sigma on a tau grid with the inter-pole interval index of each point.

    Points within the pole guard are returned as nan.
    """
    if poles is None:
        poles = dirichlet_eigenvalues(stream, tol)
    out = []
    for t in np.asarray(taus, dtype=float):
        try:
            val = sigma_eval(stream, float(t), tol)
        except PoleProximityError:
            val = math.nan
        out.append((float(t), val, int(np.searchsorted(poles, t))))
    return out
