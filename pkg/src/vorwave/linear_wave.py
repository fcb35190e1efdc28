"""Small-amplitude periodic waves bifurcating from a stream at a root tau0.

The kernel W solves -W'' + (tau^2 - omega'(U)) W = (z U' tau^2 + 2 omega(U))/h
with W(0) = W(h) = 0. It is assembled from the Green's function of the
homogeneous problem: v0 shot upwards from the bed and vh shot downwards from
the surface, which stays well conditioned when tau*h is large.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from . import kernels as K
from .dispersion import (
    POLE_GUARD,
    _far_bracket,
    _sgn,
    _sigma_near_pole,
    dirichlet_eigenvalues,
    sigma_eval,
)
from .errors import (
    AmplitudeError,
    ContinuationError,
    DerivativeError,
    PoleProximityError,
    SearchError,
    SolvabilityError,
)
from .shooting import initial_state, shoot
from .stream import build_stream_solution, parse_branch
from .tolerances import resolve

_LOG_RENORM = 100.0 * math.log(10.0)


@dataclass
class KernelSolution:
    tau: float
    z: np.ndarray
    W: np.ndarray
    Wz: np.ndarray
    Wz_h: float
    sigma0: float
    residual: float


def solve_kernel(stream, tau0, n_samples=257, tol=None):
    """Solve the kernel boundary value problem at ``tau0``.

    ``residual`` is |W'(h) - (kappa/h - 1/kappa)|, which vanishes exactly
    when ``tau0`` is a root of sigma (and equals |sigma(tau0)| otherwise).

    Raises
    ------
    SolvabilityError
        If ``tau0`` is (numerically) a Dirichlet eigenvalue.
    """
    tol = resolve(tol)
    h, spec = stream.h, stream.spec
    z = np.linspace(0.0, h, n_samples)
    tau2 = tau0 * tau0
    up = shoot(spec, initial_state(stream.p), 0.0, z[1:], tau2=tau2, flags=K.FLAG_SPEC, tol=tol)
    if abs(up.final[4]) < POLE_GUARD * up.vmax:
        raise SolvabilityError(f"tau={tau0!r} is a Dirichlet eigenvalue: the kernel problem is singular")
    y_top = np.zeros(K.NSTATE)
    y_top[0] = 1.0
    y_top[1] = stream.kappa
    y_top[5] = -1.0
    down = shoot(spec, y_top, h, z[::-1][1:], tau2=tau2, flags=K.FLAG_SPEC, tol=tol)
    if abs(down.final[0]) > 1e-8:
        raise SolvabilityError("backward stream integration does not return to U(0) = 0")

    # rows ordered by z
    v0 = np.concatenate([[0.0], up.states[:, 4]])
    v0p = np.concatenate([[1.0], up.states[:, 5]])
    A0 = np.concatenate([[0.0], up.states[:, 7]])
    k0 = np.concatenate([[0], up.renorm])
    vh = np.concatenate([down.states[::-1, 4], [0.0]])
    vhp = np.concatenate([down.states[::-1, 5], [-1.0]])
    Ah = np.concatenate([down.states[::-1, 7], [0.0]])
    kh = np.concatenate([down.renorm[::-1], [0]])
    I0 = A0 / h
    Ih = -Ah / h
    v0h = v0[-1]
    scale = np.exp(_LOG_RENORM * (k0 + kh - k0[-1]).astype(float))
    W = (vh * I0 + v0 * Ih) / v0h * scale
    Wz = (vhp * I0 + v0p * Ih) / v0h * scale
    W[0] = 0.0
    W[-1] = 0.0
    Wz_h = float(Wz[-1])
    sigma0 = float(I0[-1] / v0h)
    target = stream.kappa / h - 1.0 / stream.kappa
    return KernelSolution(float(tau0), z, W, Wz, Wz_h, sigma0, float(abs(Wz_h - target)))


@dataclass
class FirstOrderField:
    tau0: float
    t: float
    X: np.ndarray
    zeta: np.ndarray
    Y: np.ndarray
    Psi: np.ndarray
    Psi_Y: np.ndarray
    xi: np.ndarray
    bernoulli_defect: float
    symmetry_defect: float


def first_order_field(stream, tau0, t, nx=65, nz=33, periods=1.0, kernel=None, tol=None):
    """Leading-order wave field on a rectangular (X, z/h) grid.

    xi(X) = h + t cos(tau0 X) and Psi = U(z) + t W(z) cos(tau0 X) on the
    flattened coordinate z = Y h / xi. ``bernoulli_defect`` is the maximum
    of | |grad Psi|^2 + 2 xi - 3 r | on the surface, which is O(t^2).

    Raises
    ------
    AmplitudeError
        If |t| > 0.05 h.
    """
    h = stream.h
    if abs(t) > 0.05 * h:
        raise AmplitudeError(f"|t|={abs(t)!r} exceeds the small-amplitude bound 0.05 h = {0.05 * h!r}")
    if kernel is None:
        kernel = solve_kernel(stream, tau0, n_samples=nz, tol=tol)
    zf = kernel.z / h
    span = periods * 2.0 * math.pi / tau0
    X = np.linspace(-0.5 * span, 0.5 * span, nx)
    shot = shoot(stream.spec, initial_state(stream.p), 0.0, kernel.z[1:], tol=tol)
    U = np.concatenate([[0.0], shot.states[:, 0]])
    Up = np.concatenate([[stream.p], shot.states[:, 1]])
    c = np.cos(tau0 * X)
    xi = h + t * c
    Y = xi[:, None] * zf[None, :]
    Psi = U[None, :] + t * kernel.W[None, :] * c[:, None]
    Psi_Y = (h / xi)[:, None] * (Up[None, :] + t * kernel.Wz[None, :] * c[:, None])
    # surface gradient
    dxi = -t * tau0 * np.sin(tau0 * X)
    grad_z = stream.kappa + t * kernel.Wz_h * c
    psi_x = -h * dxi / xi * grad_z
    psi_y = h / xi * grad_z
    defect = float(np.max(np.abs(psi_x ** 2 + psi_y ** 2 + 2.0 * xi - 3.0 * stream.r)))
    mirror = U[None, :] + t * kernel.W[None, :] * np.cos(-tau0 * X)[:, None]
    sym = float(np.max(np.abs(mirror - Psi)))
    return FirstOrderField(float(tau0), float(t), X, zf, Y, Psi, Psi_Y, xi, defect, sym)


def vertical_sign_changes(field_, column=None):
    """Number of sign changes of Psi_Y along one vertical line (critical layers)."""
    j = field_.X.size // 2 if column is None else column
    sg = np.sign(field_.Psi_Y[j])
    sg = sg[sg != 0]
    return int(np.count_nonzero(sg[1:] != sg[:-1])) if sg.size else 0


def harmonic_resonances(profile, rtol=1e-9):
    """Pairs (k, tau0) with k >= 2 and k*tau0 also a root (excluded case)."""
    taus = [r.tau0 for r in profile.roots]
    hits = []
    for t0 in taus:
        for t1 in taus:
            k = t1 / t0
            kr = round(k)
            if kr >= 2 and abs(k - kr) <= rtol * kr:
                hits.append((int(kr), t0))
    return hits


# --------------------------------------------------------------------------
# continuation in s


def sigma_star_eval(spec, s, branch, tau, tol=None):
    """sigma(tau) for the stream on ``branch`` at slope ``s``."""
    return sigma_eval(build_stream_solution(spec, s, branch, n_samples=65, tol=tol), tau, tol)


def sigma_star_s_derivative(spec, s, branch, tau, tol=None):
    """d sigma*/ds at fixed tau: central differences plus one Richardson step.

    Raises
    ------
    DerivativeError
        If a stencil point falls on a pole.
    """
    d = 1e-5 * max(1.0, s)

    def cd(e):
        return (sigma_star_eval(spec, s + e, branch, tau, tol)
                - sigma_star_eval(spec, s - e, branch, tau, tol)) / (2.0 * e)

    try:
        d1, d2 = cd(d), cd(0.5 * d)
    except PoleProximityError as exc:
        raise DerivativeError(f"finite-difference stencil hits a pole near tau={tau!r}") from exc
    return (4.0 * d2 - d1) / 3.0


def _top_root(stream, guess, tol):
    """Root of sigma in the interval above the largest pole."""
    poles = dirichlet_eigenvalues(stream, tol)
    top = poles[-1] if len(poles) else 0.0
    sk = _sgn(stream.kappa)
    if guess is not None and guess > top:
        for w in (0.02, 0.1, 0.3):
            a = max(guess * (1.0 - w), top + 1e-9 * max(1.0, top) if len(poles) else 0.0)
            b = guess * (1.0 + w)
            try:
                fa, fb = sigma_eval(stream, a, tol), sigma_eval(stream, b, tol)
            except PoleProximityError:
                continue
            if _sgn(fa) == -sk and _sgn(fb) == sk:
                return brentq(lambda x: sigma_eval(stream, x, tol), a, b, xtol=1e-14, rtol=1e-15), top
    if len(poles):
        a = _sigma_near_pole(stream, top, 1.0, -sk, max(top, 1.0), tol)
    else:
        a = 0.0 if _sgn(sigma_eval(stream, 0.0, tol)) == -sk else None
    if a is None:
        raise ContinuationError(f"no root above the top pole at s={stream.s!r}")
    b = _far_bracket(stream, max(50.0 / stream.h, 2.0 * a, 1e-3), sk, tol)
    return brentq(lambda x: sigma_eval(stream, x, tol), a, b, xtol=1e-14, rtol=1e-15), top


@dataclass
class StationaryPoint:
    s: float
    tau: float
    sigma_dot: float


@dataclass
class TauCurve:
    branch: object
    s: np.ndarray
    tau: np.ndarray
    tau_dot_sign: np.ndarray
    sigma_dot: np.ndarray
    stationary: list = field(default_factory=list)


def _extrapolate(ss, ts, s):
    if len(ts) >= 2 and ss[-1] != ss[-2] and ts[-1] > 0 and ts[-2] > 0:
        la, lb = math.log(ts[-2]), math.log(ts[-1])
        return math.exp(lb + (lb - la) * (s - ss[-1]) / (ss[-1] - ss[-2]))
    return ts[-1] if ts else None


def trace_tau_curve(spec, branch, s_values, tol=None, with_derivative=True, refine=True):
    """Follow the top root tau(s) of sigma* over the given s values.

    Each root is bracketed around an extrapolation of the previous ones, with
    a full bracket search as fallback. The sign of dtau/ds comes from
    transversality, dtau/ds = -sigma*_s / sigma*_tau with sign(sigma*_tau) =
    sign(kappa). Sign changes are refined to stationary points where
    sigma*_s(tau(s); s) = 0.
    """
    branch = parse_branch(branch)
    tol = resolve(tol)
    s_values = np.asarray(s_values, dtype=float)
    ss, ts, signs, sdots = [], [], [], []
    for s in s_values:
        stream = build_stream_solution(spec, float(s), branch, n_samples=65, tol=tol)
        t0, _ = _top_root(stream, _extrapolate(ss, ts, s), tol)
        ss.append(float(s))
        ts.append(float(t0))
        if with_derivative:
            sd = sigma_star_s_derivative(spec, float(s), branch, t0, tol)
            sdots.append(sd)
            signs.append(int(-_sgn(sd) * _sgn(stream.kappa)))
    curve = TauCurve(branch, np.array(ss), np.array(ts), np.array(signs, dtype=int),
                     np.array(sdots))
    if with_derivative and refine:
        for i in range(len(ss) - 1):
            if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
                curve.stationary.append(_stationary(spec, branch, ss[i], ss[i + 1], ts[i], tol))
    return curve


def _stationary(spec, branch, a, b, guess, tol):
    cache = {}

    def G(s):
        stream = build_stream_solution(spec, s, branch, n_samples=65, tol=tol)
        t0, _ = _top_root(stream, guess, tol)
        val = sigma_star_s_derivative(spec, s, branch, t0, tol)
        cache[s] = (t0, val)
        return val

    try:
        s_st = brentq(G, a, b, xtol=1e-10, rtol=1e-12)
    except ValueError as exc:
        raise SearchError("stationary point bracket lost its sign change") from exc
    if s_st not in cache:
        G(s_st)
    t0, val = cache[s_st]
    return StationaryPoint(float(s_st), float(t0), float(val))


def fit_large_s(s, tau):
    """Least-squares fit tau = L + a/s + c/s^2; returns (L, a, c)."""
    s = np.asarray(s, dtype=float)
    A = np.column_stack([np.ones_like(s), 1.0 / s, 1.0 / s ** 2])
    coef, *_ = np.linalg.lstsq(A, np.asarray(tau, dtype=float), rcond=None)
    return tuple(float(c) for c in coef)


def fit_blowup(s, tau, s0):
    """Slope of log tau against log(s^2 - s0^2) (tau ~ (s^2 - s0^2)^p)."""
    s = np.asarray(s, dtype=float)
    x = np.log(s * s - s0 * s0)
    y = np.log(np.asarray(tau, dtype=float))
    p, _ = np.polyfit(x, y, 1)
    return float(p)
