"""Closed-form reference values for the three explicit vorticity families.

These functions deliberately share no code with the numerical pipeline:
they use only the explicit formulas for depths, heads, eigenvalues and
dispersion functions, plus a local bisection.
"""

import math

import numpy as np


def _bisect(f, a, b, tol=1e-15, max_iter=400):
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError("bisection interval does not bracket a root")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or (b - a) <= tol * max(1.0, abs(m)):
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _roots_from_sigma(sigma, kappa, tau_max, n=20001):
    """Roots of a closed-form sigma: crossings from -sign(kappa) to +sign(kappa).

    Crossings in the opposite direction are poles.
    """
    sk = 1.0 if kappa > 0 else -1.0
    # sigma ~ kappa tau for large tau: stretch the cap until that sign shows
    for _ in range(40):
        if sk * sigma(tau_max) > 0.0:
            break
        tau_max *= 2.0
    grid = np.linspace(tau_max / n, tau_max, n)
    with np.errstate(all="ignore"):
        vals = np.array([sigma(t) for t in grid])
    roots = []
    prev_t, prev_v = 1e-9 * tau_max, sigma(1e-9 * tau_max)
    for t, v in zip(grid, vals):
        if np.isfinite(prev_v) and np.isfinite(v) and sk * prev_v < 0.0 <= sk * v:
            roots.append(_bisect(sigma, prev_t, t))
        prev_t, prev_v = t, v
    return roots


# --------------------------------------------------------------------------
# irrotational


def irrotational_sigma(h, tau):
    """sigma(tau) = tau coth(h tau)/h - h for the uniform stream of depth h."""
    if tau == 0.0:
        return 1.0 / (h * h) - h
    return tau / (h * math.tanh(h * tau)) - h


def irrotational_oracle(h):
    """Root of tau coth(h tau) = h^2; ``tau0`` is None when h <= 1.

    For h <= 1 the left side exceeds h^2 for every tau > 0 (it starts at
    1/h >= h^2 and increases), confirmed here by a dense scan.
    """
    f = lambda t: (t / math.tanh(h * t) if t > 0 else 1.0 / h) - h * h
    if h <= 1.0:
        grid = np.linspace(1e-6, 50.0 / h, 20001)
        vals = np.array([f(t) for t in grid])
        if np.any(vals <= 0):
            raise AssertionError("dense scan found a root where none is expected")
        return {"tau0": None, "rootless": True, "formula": "coth"}
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    tau0 = _bisect(f, 1e-14, hi)
    return {"tau0": tau0, "lambda0": 2 * math.pi / tau0, "rootless": False, "formula": "coth"}


# --------------------------------------------------------------------------
# constant vorticity omega = b


def constant_s_c(b):
    """Minimiser of R_0^(+): root of (s b)^2 - 2 b^3 = (s b / (1 + s b))^2."""
    g = lambda s: (s * b) ** 2 - 2 * b ** 3 - (s * b / (1 + s * b)) ** 2
    s0 = math.sqrt(2 * b)
    hi = s0 + 1.0
    while g(hi) < 0:
        hi *= 2.0
    return _bisect(g, s0, hi)


def constant_vorticity_oracle(b, s):
    """Depths, heads and dispersion data for omega = b > 0, s >= sqrt(2b)."""
    rad = math.sqrt(max(s * s - 2 * b, 0.0))
    h0 = (s - rad) / b
    h1 = (s + rad) / b
    R0 = (s * s - 2 * b + 2 * h0) / 3
    R1 = (s * s - 2 * b + 2 * h1) / 3

    def kappa(h):
        return s - b * h

    def sigma(tau, h):
        k = kappa(h)
        g = 1.0 / h if tau == 0.0 else tau / math.tanh(tau * h)
        return k * g - 1.0 / k + b

    def lhs(tau, h):
        # tau (b h - s) coth(tau h) - b - (b h - s)^{-1}; equals -sigma
        return tau * (b * h - s) / math.tanh(tau * h) - b - 1.0 / (b * h - s)

    def roots(h):
        k = kappa(h)
        return _roots_from_sigma(lambda t: sigma(t, h), k, 60.0 / h)

    return {
        "s0": math.sqrt(2 * b),
        "h0": h0, "h1": h1, "R0": R0, "R1": R1,
        "r0": 2.0 / 3.0 * math.sqrt(2.0 / b),
        "s_c": constant_s_c(b),
        "kappa": kappa, "sigma": sigma, "dispersion_lhs": lhs, "roots": roots,
        "hdot0": (1 - s / rad) / b if rad > 0 else -math.inf,
        "hdot1": (1 + s / rad) / b if rad > 0 else math.inf,
        "formulas": {"h": "N2", "R": "feb14", "s_c": "root1", "sigma": "dispers_b"},
    }


# --------------------------------------------------------------------------
# linear vorticity omega(t) = b t


def linear_depth(b, s, j, sign):
    base = (-1) ** j / math.sqrt(b) * math.asin(math.sqrt(b) / s) + j * math.pi / math.sqrt(b)
    return base if sign > 0 else base + math.pi / math.sqrt(b)


def linear_R(b, s, j, sign):
    return (s * s - b + 2 * (-1) ** j / math.sqrt(b) * math.asin(math.sqrt(b) / s)
            + 2 * math.pi / math.sqrt(b) * (j + 0.5 - 0.5 * sign)) / 3


def linear_s_c(b):
    """True minimiser of R_0^(+): s^4 (s^2 - b) = 1 (from dR/ds = 0)."""
    g = lambda s: s ** 4 * (s * s - b) - 1.0
    lo = math.sqrt(b)
    hi = lo + 1.0
    while g(hi) < 0:
        hi *= 2.0
    return _bisect(g, lo, hi)


def linear_s_c_printed(b):
    """sqrt(b/2 + sqrt(b^2/4 + 1)), the closed form as printed."""
    return math.sqrt(b / 2 + math.sqrt((b / 2) ** 2 + 1))


def linear_vorticity_oracle(b, s, j, sign):
    """Depth, head, eigenvalues and dispersion function on branch (j, sign)."""
    h = linear_depth(b, s, j, sign)
    kappa = sign * s * math.cos(math.sqrt(b) * h)
    eig = []
    k = 1
    while b - (math.pi * k / h) ** 2 > 0:
        eig.append(b - (math.pi * k / h) ** 2)
        k += 1

    def G(tau):
        d = tau * tau - b
        if d > 0:
            q = math.sqrt(d)
            return q / math.tanh(q * h)
        if d < 0:
            q = math.sqrt(-d)
            return q / math.tan(q * h)
        return 1.0 / h

    def lhs(tau):
        # s^2 cos^2(sqrt(b) h) G - 1 +- b s cos(sqrt(b) h) = kappa * sigma
        return kappa * kappa * G(tau) - 1.0 + b * kappa

    def sigma(tau):
        return lhs(tau) / kappa

    tau_max = max(60.0 / h, 4 * math.sqrt(b))
    return {
        "h": h, "R": linear_R(b, s, j, sign), "kappa": kappa,
        "eigenvalues_tau2": eig,
        "dispersion_lhs": lhs, "sigma": sigma,
        "roots": _roots_from_sigma(sigma, kappa, tau_max),
        "s0": math.sqrt(b), "r0": math.pi / (3 * math.sqrt(b)),
        "s_c": linear_s_c(b), "s_c_printed": linear_s_c_printed(b),
        "formulas": {"h": "N2_t", "R": "N2+1_t", "eigenvalues": "spec_b", "sigma": "d_b>,d_b<"},
    }


def linear_tau_curve(b, s):
    """Top root tau(s) on the h_0^(-) branch from the reduced closed forms."""
    h = math.pi / math.sqrt(b) + math.asin(math.sqrt(b) / s) / math.sqrt(b)
    e = s * s - b

    def F(tau):
        d = tau * tau - b
        if d > 0:
            q = math.sqrt(d)
            G = q / math.tanh(q * h)
        elif d < 0:
            q = math.sqrt(-d)
            G = q / math.tan(q * h)
        else:
            G = 1.0 / h
        return e * G - 1.0 + b * math.sqrt(e)

    lo = math.sqrt(b - (math.pi / h) ** 2)
    lo = lo + 1e-12 * max(1.0, lo)
    hi = 2.0 * math.sqrt(b)
    while F(hi) < 0:
        hi *= 2.0
    while F(lo) > 0:
        lo = 0.5 * (lo + math.sqrt(b - (math.pi / h) ** 2))
    return _bisect(F, lo, hi)


def asymptote_oracle(b):
    """Large-s law tau(s) ~ level + coefficient/s on the h_0^(-) branch."""
    return {"level": math.sqrt(3 * b) / 2, "coefficient": -b * math.sqrt(3) / (2 * math.pi),
            "formula": "22janu"}
