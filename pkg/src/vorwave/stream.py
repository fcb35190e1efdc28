"""Stream solutions U(Y) of U'' + omega(U) = 0, U(0) = 0, U(h) = 1.

The first integral U'^2 + 2 Omega(U) = s^2 reduces every branch to a few
quadratures in the shooting slope s = |U'(0)|. Branches are labelled
``(j, +)`` or ``(j, -)``: ``j`` counts turning points of U below the
free surface, and the sign is the sign of U'(0).
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import kernels as K
from .errors import (
    AssemblyError,
    BranchUnavailableError,
    ConfigurationError,
    ConsistencyError,
    DerivativeError,
    DomainError,
    SearchError,
)
from .quadrature import graded_gauss
from .shooting import initial_state, shoot
from .tolerances import resolve
from .vorticity import VorticitySpec, compute_s0, _golden_max

_TAU_SCAN_CHUNKS = (2.0, 8.0, 32.0, 128.0, 512.0, 2048.0, 1e4, 1e5, 1e6)
_TAYLOR_U2 = 1e-6


class Branch(NamedTuple):
    j: int
    sign: int

    def __str__(self):
        return f"{self.j}{'+' if self.sign > 0 else '-'}"

    @property
    def layers(self):
        return self.j + 1 if self.sign > 0 else self.j + 2


def parse_branch(value) -> Branch:
    """Accept ``Branch``, ``(j, sign)`` or strings like ``"0+"``, ``"1-"``."""
    if isinstance(value, Branch):
        return value
    if isinstance(value, tuple) and len(value) == 2:
        j, sg = value
        if isinstance(sg, str):
            sg = 1 if sg == "+" else -1 if sg == "-" else 0
        if int(j) < 0 or sg not in (1, -1):
            raise ConfigurationError(f"invalid branch {value!r}")
        return Branch(int(j), int(sg))
    text = str(value).strip()
    if len(text) >= 2 and text[-1] in "+-" and text[:-1].isdigit():
        return Branch(int(text[:-1]), 1 if text[-1] == "+" else -1)
    raise ConfigurationError(f"invalid branch {value!r}; expected e.g. '0+' or '1-'")


# --------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    Y: np.ndarray
    U: np.ndarray
    Up: np.ndarray


def integrate_cauchy(spec, s, sign, Y_max, n_samples=513, tol=None):
    """Integrate U'' = -omega(U), U(0) = 0, U'(0) = sign*s on [0, Y_max]."""
    if not (math.isfinite(Y_max) and Y_max > 0):
        raise ConfigurationError("Y_max must be positive and finite")
    Y = np.linspace(0.0, Y_max, n_samples)
    shot = shoot(spec, initial_state(sign * s), 0.0, Y[1:], tol=tol)
    U = np.concatenate([[0.0], shot.states[:, 0]])
    Up = np.concatenate([[sign * s], shot.states[:, 1]])
    return Trajectory(Y, U, Up)


def first_integral_residual(traj, spec, s):
    """max |U'^2 + 2 Omega(U) - s^2| along a trajectory."""
    return float(np.max(np.abs(traj.Up ** 2 + 2.0 * spec.Omega(traj.U) - s * s)))


# --------------------------------------------------------------------------
# turning points and quadratures


def _g(spec, s, t):
    return s * s - 2.0 * spec.Omega(t)


def _first_root(spec, s, dirn):
    """First root of s^2 - 2 Omega along dirn*tau > 0, or None."""
    lo = 0.0
    for hi in _TAU_SCAN_CHUNKS:
        t = np.linspace(lo, hi, 4097)
        g = _g(spec, s, dirn * t)
        bad = np.nonzero(g <= 0.0)[0]
        if bad.size:
            i = int(bad[0])
            if g[i] == 0.0 or i == 0:
                return dirn * float(t[i])
            r = brentq(lambda u: float(_g(spec, s, dirn * u)), t[i - 1], t[i], xtol=1e-15, rtol=1e-15)
            return dirn * r
        dip = _tangent_root(spec, s, dirn, t, g)
        if dip is not None:
            return dip
        lo = hi
    return None


def _tangent_root(spec, s, dirn, t, g):
    """Catch a double root where g touches zero without changing sign."""
    interior = np.nonzero((g[1:-1] < g[:-2]) & (g[1:-1] <= g[2:]))[0] + 1
    for i in interior:
        if g[i] > 1e-6 * s * s:
            continue
        x, gx = _golden_max(lambda u: -float(_g(spec, s, dirn * u)), t[i - 1], t[i + 1])
        if -gx <= 1e-13 * max(1.0, s * s):
            return dirn * x
    return None


def tau_bounds(spec, s):
    """Return ``(tau_minus, tau_plus)``; +-inf when no turning point exists."""
    if s <= 0:
        raise DomainError("s must be positive")
    tp = _first_root(spec, s, 1.0)
    tm = _first_root(spec, s, -1.0)
    return (-math.inf if tm is None else tm), (math.inf if tp is None else tp)


def _local_minima(spec, s, a, b, n=2049):
    t = np.linspace(a, b, n)
    g = _g(spec, s, t)
    idx = np.nonzero((g[1:-1] < g[:-2]) & (g[1:-1] <= g[2:]))[0] + 1
    return t[idx]


def _sub_integrand(spec, s, e, dirn, g_e):
    """Integrand 2u/sqrt(g(e + dirn*u^2)) with a Taylor form near u = 0."""
    w_e = float(spec.omega(e))
    wp_e = float(spec.omega_prime(e))

    def f(u):
        u2 = u * u
        tau = e + dirn * u2
        g = _g(spec, s, tau)
        small = u2 < _TAYLOR_U2
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = 2.0 * u / np.sqrt(g)
            if g_e == 0.0:
                taylor = 2.0 / np.sqrt(-2.0 * w_e * dirn - wp_e * u2)
            else:
                taylor = 2.0 * u / np.sqrt(g_e - 2.0 * w_e * dirn * u2 - wp_e * u2 * u2)
        return np.where(small, taylor, direct)

    return f


def _endpoint_integral(spec, s, e, tol, sign_out):
    """int_0^e dtau / sqrt(g) for a turning point e (g(e) = 0)."""
    w_e = float(spec.omega(e))
    if abs(w_e) <= 1e-12 * max(1.0, spec.lipschitz_bound):
        return sign_out * math.inf
    dirn = -1.0 if e > 0 else 1.0
    umax = math.sqrt(abs(e))
    focus = [0.0, umax]
    lo, hi = (0.0, e) if e > 0 else (e, 0.0)
    for tm in _local_minima(spec, s, lo, hi):
        focus.append(math.sqrt(abs(e - tm)))
    f = _sub_integrand(spec, s, e, dirn, 0.0)
    val = graded_gauss(f, 0.0, umax, focus=focus, rtol=tol.quad_tol * 1e-2)
    return sign_out * val


def y_bounds(spec, s, tol=None, taus=None):
    """Return ``(y_minus, y_plus)``: Y-coordinates of the turning points.

    ``y_plus = int_0^{tau_plus} dtau/sqrt(s^2 - 2 Omega)``, ``y_minus`` is
    the analogous (negative) integral to ``tau_minus``. Infinite when the
    turning point does not exist or is a double root.
    """
    tol = resolve(tol)
    tm, tp = tau_bounds(spec, s) if taus is None else taus
    yp = math.inf if not math.isfinite(tp) else _endpoint_integral(spec, s, tp, tol, 1.0)
    ym = -math.inf if not math.isfinite(tm) else _endpoint_integral(spec, s, tm, tol, -1.0)
    return ym, yp


def depth_h0(spec, s, tol=None):
    """Depth of the monotone branch, ``int_0^1 dtau/sqrt(s^2 - 2 Omega)``."""
    tol = resolve(tol)
    t = np.linspace(0.0, 1.0, 2049)
    g = _g(spec, s, t)
    if np.any(g[:-1] <= 0.0) or g[-1] < 0.0:
        raise DomainError(f"s={s!r} is not above s0: s^2 - 2 Omega vanishes on [0, 1)")
    g1 = float(g[-1])
    if g1 == 0.0 and float(spec.omega(1.0)) <= 0.0:
        raise DomainError("depth integral diverges at U = 1")
    focus = [0.0, 1.0]
    for tm in _local_minima(spec, s, 0.0, 1.0):
        focus.append(math.sqrt(1.0 - tm))
    f = _sub_integrand(spec, s, 1.0, -1.0, g1)
    return graded_gauss(f, 0.0, 1.0, focus=focus, rtol=tol.quad_tol * 1e-2)


@dataclass
class DepthCatalog:
    s: float
    tau_minus: float
    tau_plus: float
    y_minus: float
    y_plus: float
    h0: float
    depths_plus: list
    depths_minus: list
    coincident: bool = False
    flags: list = field(default_factory=list)

    def depth(self, branch):
        branch = parse_branch(branch)
        seq = self.depths_plus if branch.sign > 0 else self.depths_minus
        if branch.j >= len(seq):
            raise ConfigurationError(f"branch index {branch.j} exceeds catalog j_max={len(seq) - 1}")
        return seq[branch.j]


def depth_sequences(spec, s, j_max=8, tol=None):
    """All depths h_j^(+-)(s), j = 0..j_max; unavailable ones are +inf."""
    tol = resolve(tol)
    s0, _ = compute_s0(spec)
    if s <= s0:
        raise DomainError(f"s={s!r} must exceed s0={s0!r}")
    h0 = depth_h0(spec, s, tol)
    tm, tp = tau_bounds(spec, s)
    ym, yp = y_bounds(spec, s, tol, taus=(tm, tp))
    period = yp - ym
    plus, minus = [], []
    for j in range(j_max + 1):
        k = j // 2
        if j % 2 == 0:
            hj = h0 if k == 0 else h0 + 2 * k * period
        else:
            hj = h0 + 2.0 * (yp - h0) + (2 * k * period if k else 0.0)
        if not math.isfinite(hj):
            hj = math.inf
        plus.append(hj)
        minus.append(hj - 2.0 * ym if math.isfinite(hj) and math.isfinite(ym) else math.inf)
    flags = []
    if not (math.isfinite(tm) and math.isfinite(tp)):
        flags.append("turning-point-beyond-scan-cap")
    coincident = math.isfinite(tp) and abs(tp - 1.0) <= 1e-12
    if coincident:
        flags.append("coincident-odd-even-depths")
    return DepthCatalog(s, tm, tp, ym, yp, h0, plus, minus, coincident, flags)


def _depth(spec, s, branch, tol):
    if branch == Branch(0, 1):
        return depth_h0(spec, s, tol)
    return depth_sequences(spec, s, branch.j, tol).depth(branch)


def bernoulli_R(spec, s, branch=Branch(0, 1), tol=None):
    """Bernoulli constant R_j(s) = (s^2 - 2 Omega(1) + 2 h_j(s)) / 3."""
    branch = parse_branch(branch)
    tol = resolve(tol)
    h = _depth(spec, s, branch, tol)
    if not math.isfinite(h):
        raise BranchUnavailableError(f"branch {branch} does not exist at s={s!r}")
    return (s * s - 2.0 * float(spec.Omega(1.0)) + 2.0 * h) / 3.0


# --------------------------------------------------------------------------
# critical values


@dataclass
class CriticalValues:
    s0: float
    tau_max: float
    s_c: float
    r_c: float
    r0: float
    r0_finite: bool
    richardson: list = field(default_factory=list)


def _s_mesh(s0, n, span=50.0, first=1e-6):
    if s0 > 0:
        return s0 + np.geomspace(first, span, n)
    return np.geomspace(1e-4, span, n)


def critical_values(spec: VorticitySpec, n_seed=2000, tol=None) -> CriticalValues:
    """s0, the minimiser s_c of R_0^(+), r_c = R_0^(+)(s_c) and r0 = R_0^(+)(s0+)."""
    tol = resolve(tol)
    s0, tmax = compute_s0(spec)
    mesh = _s_mesh(s0, n_seed)
    vals = np.array([bernoulli_R(spec, s, Branch(0, 1), tol) for s in mesh])
    i = int(np.argmin(vals))
    if i == len(mesh) - 1:
        raise SearchError("R_0^(+) has no interior minimum on the s-scan")
    lo = mesh[max(i - 1, 0)]
    hi = mesh[i + 1]
    # R' = (2/3)(s + hdot): polish the minimiser on the derivative
    def dR(u):
        return u + h_derivative(spec, u, Branch(0, 1), tol)

    if dR(lo) < 0.0 < dR(hi):
        sc = brentq(dR, lo, hi, xtol=1e-15, rtol=1e-15)
    else:
        sc, _ = _golden_max(lambda u: -bernoulli_R(spec, u, Branch(0, 1), tol), lo, hi, tol=1e-13)
    rc = bernoulli_R(spec, sc, Branch(0, 1), tol)
    r0, finite, table = _r0_limit(spec, s0, tol)
    return CriticalValues(s0, tmax, float(sc), float(rc), r0, finite, table)


def _r0_limit(spec, s0, tol, delta=1e-2, levels=9):
    ds = [delta * 4.0 ** -k for k in range(levels)]
    R = [bernoulli_R(spec, s0 + d, Branch(0, 1), tol) for d in ds]
    inc = [R[k] - R[k - 1] for k in range(1, levels)]
    if abs(inc[-1]) >= 0.75 * abs(inc[-2]):
        return (math.inf if inc[-1] > 0 else -math.inf), False, R
    # expansion in sqrt(delta); successive sqrt(delta) halve
    table = [list(R)]
    for p in range(1, 4):
        prev = table[-1]
        fac = 2.0 ** p
        table.append([(fac * prev[k + 1] - prev[k]) / (fac - 1.0) for k in range(len(prev) - 1)])
    best = table[-1][-1]
    return float(best), True, [row[-1] for row in table]


def r_curve(spec, branch, s_values, tol=None):
    """R of one branch on an s grid (nan where the branch does not exist)."""
    out = []
    for s in np.asarray(s_values, dtype=float):
        try:
            out.append(bernoulli_R(spec, float(s), branch, tol))
        except BranchUnavailableError:
            out.append(math.nan)
    return np.asarray(out)


def solve_bernoulli_for_s(spec, r, branch=Branch(0, 1), n_seed=400, tol=None, s_span=50.0):
    """All s in (s0, s0 + s_span] with R_branch(s) = r, ascending."""
    branch = parse_branch(branch)
    tol = resolve(tol)
    s0, _ = compute_s0(spec)
    return _solve_on_mesh(lambda s: _safe(lambda: bernoulli_R(spec, s, branch, tol)) - r,
                          _s_mesh(s0, n_seed, s_span, 1e-7))


def solve_s_for_depth(spec, branch, h, n_seed=400, tol=None, s_span=50.0):
    """All s with h_branch(s) = h, ascending."""
    branch = parse_branch(branch)
    tol = resolve(tol)
    s0, _ = compute_s0(spec)
    return _solve_on_mesh(lambda s: _safe(lambda: _depth(spec, s, branch, tol)) - h,
                          _s_mesh(s0, n_seed, s_span, 1e-7))


def _safe(fn):
    try:
        v = fn()
    except BranchUnavailableError:
        return math.nan
    return v if math.isfinite(v) else math.nan


def _solve_on_mesh(G, mesh):
    vals = np.array([G(float(s)) for s in mesh])
    roots = []
    for k in range(len(mesh) - 1):
        a, b = vals[k], vals[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(mesh[k]))
        elif a * b < 0.0:
            roots.append(brentq(G, mesh[k], mesh[k + 1], xtol=1e-14, rtol=1e-15))
    return roots


# --------------------------------------------------------------------------
# assembled solutions


@dataclass
class StreamSolution:
    spec: VorticitySpec
    s: float
    branch: Branch
    h: float
    kappa: float
    r: float
    Y: np.ndarray
    U: np.ndarray
    Up: np.ndarray
    layers: int
    near_bottom: int
    near_surface: int
    flags: list = field(default_factory=list)

    @property
    def p(self):
        return self.branch.sign * self.s


def _polish_depth(spec, p, h, tol):
    for _ in range(6):
        st = shoot(spec, initial_state(p), 0.0, [h], tol=tol).final
        F, dF = st[0] - 1.0, st[1]
        if dF == 0.0:
            break
        step = F / dF
        h -= step
        if abs(step) <= 1e-15 * max(1.0, h):
            break
    return h


def build_stream_solution(spec, s, branch=Branch(0, 1), n_samples=513, tol=None) -> StreamSolution:
    """Assemble the stream on branch ``branch`` with shooting slope ``s``.

    The depth from the quadrature formulas is polished by Newton's method
    on U(h) = 1, then the invariants are checked.

    Raises
    ------
    BranchUnavailableError, AssemblyError, ConsistencyError
    """
    branch = parse_branch(branch)
    tol = resolve(tol)
    cat = depth_sequences(spec, s, branch.j, tol)
    h = cat.depth(branch)
    if not math.isfinite(h):
        raise BranchUnavailableError(f"branch {branch} does not exist at s={s!r}")
    flags = list(cat.flags)
    p = branch.sign * s
    h_q = h
    h = _polish_depth(spec, p, h, tol)
    if abs(h - h_q) > 1e-7 * max(1.0, h):
        raise AssemblyError(f"depth polish moved h from {h_q!r} to {h!r}")
    Y = np.linspace(0.0, h, n_samples)
    shot = shoot(spec, initial_state(p), 0.0, Y[1:], tol=tol)
    U = np.concatenate([[0.0], shot.states[:, 0]])
    Up = np.concatenate([[p], shot.states[:, 1]])
    kappa = float(Up[-1])
    r = (s * s - 2.0 * float(spec.Omega(1.0)) + 2.0 * h) / 3.0
    if abs(U[-1] - 1.0) > 1e-9:
        raise AssemblyError(f"surface condition U(h) = 1 violated by {abs(U[-1] - 1.0):.3g}")
    fi = float(np.max(np.abs(Up ** 2 + 2.0 * spec.Omega(U) - s * s)))
    if fi > 1e-8 * max(1.0, s * s):
        raise AssemblyError(f"first integral residual {fi:.3g}")
    if abs(kappa * kappa - (3.0 * r - 2.0 * h)) > 1e-8 * max(1.0, s * s):
        raise AssemblyError("Bernoulli condition at the surface violated")
    if spec.extrapolates(float(U.min()), float(U.max())):
        flags.append("tabulated-extrapolation")
    layers, nb, ns = _count_layers(Up)
    if layers != branch.layers:
        raise ConsistencyError(
            f"branch {branch} should have {branch.layers} layers; sampled profile has {layers}")
    return StreamSolution(spec, float(s), branch, float(h), kappa, float(r), Y, U, Up,
                          layers, nb, ns, flags)


def _count_layers(Up):
    sg = np.sign(Up)
    sg = sg[sg != 0]
    changes = int(np.count_nonzero(sg[1:] != sg[:-1])) if sg.size else 0
    return changes + 1, int(np.sign(Up[0])), int(np.sign(Up[-1]))


def classify_counter_currents(sol: StreamSolution, n_samples=4097, tol=None):
    """Return ``(layers, near_bottom, near_surface)`` from a dense resample.

    ``near_bottom``/``near_surface`` are the signs of U' at Y = 0 and Y = h;
    +1 is the direction of the monotone critical flow.

    Raises
    ------
    ConsistencyError
        If the sampled layer count differs from the branch formula.
    """
    Y = np.linspace(0.0, sol.h, n_samples)
    shot = shoot(sol.spec, initial_state(sol.p), 0.0, Y[1:], tol=tol)
    Up = np.concatenate([[sol.p], shot.states[:, 1]])
    layers, nb, ns = _count_layers(Up)
    if layers != sol.branch.layers:
        raise ConsistencyError(
            f"branch {sol.branch}: formula gives {sol.branch.layers} layers, samples give {layers}")
    return layers, nb, ns


def h_derivative(spec, s, branch=Branch(0, 1), tol=None, check=False, sol=None):
    """dh_j/ds from the variational equation, hdot = -dU/ds(h) / U'(h).

    With ``check=True`` the value is compared with a central difference of
    the depth formulas and :class:`DerivativeError` is raised on mismatch.
    """
    branch = parse_branch(branch)
    tol = resolve(tol)
    if sol is None:
        sol = build_stream_solution(spec, s, branch, n_samples=3, tol=tol)
    st = shoot(spec, initial_state(sol.p), 0.0, [sol.h], flags=K.FLAG_VAR, tol=tol).final
    hdot = -branch.sign * st[2] / st[1]
    if check:
        d = 1e-5 * max(1.0, s)
        fd = (_depth(spec, s + d, branch, tol) - _depth(spec, s - d, branch, tol)) / (2 * d)
        if abs(fd - hdot) > 1e-6 * max(1.0, abs(hdot)):
            raise DerivativeError(f"variational hdot={hdot!r} differs from finite difference {fd!r}")
    return float(hdot)
