"""Adaptive Dormand-Prince shooting kernel.

Everything here is written in a numba-compatible subset so the same code
runs jitted or interpreted (see ``_jit``).

State layout
------------
0 U, 1 U', 2 D = dU/dp, 3 D', 4 v, 5 v', 6 int v^2, 7 int v*f

with f = tau^2 * Y * U' + 2*omega(U). The variational block (2, 3) and the
spectral block (4..7) are only integrated when the matching flag bit is set.
"""

import numpy as np

from ._jit import njit

NSTATE = 8
FLAG_VAR = 1
FLAG_SPEC = 2

KIND_POLY = 0
KIND_SPLINE = 1

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2
STATUS_NONFINITE = 3

RENORM = 1e100
RENORM_INV = 1e-100


@njit
def vort_eval(kind, coef, knots, t):
    """Return (omega(t), omega'(t)) for an encoded vorticity function."""
    if kind == KIND_POLY:
        n = coef.shape[1]
        w = 0.0
        wp = 0.0
        for k in range(n - 1, -1, -1):
            wp = wp * t + w
            w = w * t + coef[0, k]
        return w, wp
    m = knots.shape[0]
    if t <= knots[0]:
        return coef[3, 0] + coef[2, 0] * (t - knots[0]), coef[2, 0]
    if t >= knots[m - 1]:
        i = m - 2
        dx = knots[m - 1] - knots[i]
        w_end = ((coef[0, i] * dx + coef[1, i]) * dx + coef[2, i]) * dx + coef[3, i]
        wp_end = (3.0 * coef[0, i] * dx + 2.0 * coef[1, i]) * dx + coef[2, i]
        return w_end + wp_end * (t - knots[m - 1]), wp_end
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knots[mid] <= t:
            lo = mid
        else:
            hi = mid
    dx = t - knots[lo]
    w = ((coef[0, lo] * dx + coef[1, lo]) * dx + coef[2, lo]) * dx + coef[3, lo]
    wp = (3.0 * coef[0, lo] * dx + 2.0 * coef[1, lo]) * dx + coef[2, lo]
    return w, wp


@njit
def _rhs(x, y, out, kind, coef, knots, tau2, flags):
    w, wp = vort_eval(kind, coef, knots, y[0])
    out[0] = y[1]
    out[1] = -w
    if flags & FLAG_VAR:
        out[2] = y[3]
        out[3] = -wp * y[2]
    else:
        out[2] = 0.0
        out[3] = 0.0
    if flags & FLAG_SPEC:
        f = tau2 * x * y[1] + 2.0 * w
        out[4] = y[5]
        out[5] = (tau2 - wp) * y[4]
        out[6] = y[4] * y[4]
        out[7] = y[4] * f
    else:
        out[4] = 0.0
        out[5] = 0.0
        out[6] = 0.0
        out[7] = 0.0


@njit
def dopri5(y0, x0, x_out, kind, coef, knots, tau2, flags, rtol, atol, max_steps):
    """Integrate from ``x0`` through the ordered abscissae ``x_out``.

    Steps land exactly on every output abscissa. The spectral block is
    rescaled by 1e-100 whenever it exceeds 1e100; ``renorm[i]`` counts the
    rescalings applied before output row ``i`` was stored.

    Returns
    -------
    states, renorm, vmax, nsteps, status, x_last
    """
    n = NSTATE
    n_out = x_out.shape[0]
    states = np.zeros((n_out, n))
    renorm = np.zeros(n_out, dtype=np.int64)
    active = np.zeros(n, dtype=np.bool_)
    active[0] = True
    active[1] = True
    if flags & FLAG_VAR:
        active[2] = True
        active[3] = True
    if flags & FLAG_SPEC:
        for i in range(4, 8):
            active[i] = True
    n_act = 0
    for i in range(n):
        if active[i]:
            n_act += 1

    a21 = 1.0 / 5.0
    a31 = 3.0 / 40.0
    a32 = 9.0 / 40.0
    a41 = 44.0 / 45.0
    a42 = -56.0 / 15.0
    a43 = 32.0 / 9.0
    a51 = 19372.0 / 6561.0
    a52 = -25360.0 / 2187.0
    a53 = 64448.0 / 6561.0
    a54 = -212.0 / 729.0
    a61 = 9017.0 / 3168.0
    a62 = -355.0 / 33.0
    a63 = 46732.0 / 5247.0
    a64 = 49.0 / 176.0
    a65 = -5103.0 / 18656.0
    b1 = 35.0 / 384.0
    b3 = 500.0 / 1113.0
    b4 = 125.0 / 192.0
    b5 = -2187.0 / 6784.0
    b6 = 11.0 / 84.0
    e1 = 71.0 / 57600.0
    e3 = -71.0 / 16695.0
    e4 = 71.0 / 1920.0
    e5 = -17253.0 / 339200.0
    e6 = 22.0 / 525.0
    e7 = -1.0 / 40.0

    y = y0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    yt = np.empty(n)
    yn = np.empty(n)

    x = x0
    nren = 0
    vmax = abs(y[4])
    nsteps = 0
    _rhs(x, y, k1, kind, coef, knots, tau2, flags)
    scale_rate = abs(y[1]) + np.sqrt(abs(tau2)) + 1.0
    hs = 0.01 / scale_rate

    for j in range(n_out):
        target = x_out[j]
        dirn = 1.0 if target >= x else -1.0
        while abs(target - x) > 0.0:
            if nsteps >= max_steps:
                return states, renorm, vmax, nsteps, STATUS_MAXSTEPS, x
            if hs < 1e-14 * max(1.0, abs(x)):
                return states, renorm, vmax, nsteps, STATUS_UNDERFLOW, x
            remaining = abs(target - x)
            last = False
            h = hs
            if h >= remaining:
                h = remaining
                last = True
            dh = dirn * h
            for i in range(n):
                yt[i] = y[i] + dh * a21 * k1[i]
            _rhs(x + dh * 0.2, yt, k2, kind, coef, knots, tau2, flags)
            for i in range(n):
                yt[i] = y[i] + dh * (a31 * k1[i] + a32 * k2[i])
            _rhs(x + dh * 0.3, yt, k3, kind, coef, knots, tau2, flags)
            for i in range(n):
                yt[i] = y[i] + dh * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i])
            _rhs(x + dh * 0.8, yt, k4, kind, coef, knots, tau2, flags)
            for i in range(n):
                yt[i] = y[i] + dh * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i])
            _rhs(x + dh * (8.0 / 9.0), yt, k5, kind, coef, knots, tau2, flags)
            for i in range(n):
                yt[i] = y[i] + dh * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i]
                                     + a64 * k4[i] + a65 * k5[i])
            _rhs(x + dh, yt, k6, kind, coef, knots, tau2, flags)
            for i in range(n):
                yn[i] = y[i] + dh * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i]
                                     + b5 * k5[i] + b6 * k6[i])
            xn = target if last else x + dh
            _rhs(xn, yn, k7, kind, coef, knots, tau2, flags)
            err = 0.0
            for i in range(n):
                if active[i]:
                    sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
                    ei = dh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i]
                               + e6 * k6[i] + e7 * k7[i]) / sc
                    err += ei * ei
            err = np.sqrt(err / n_act)
            if not np.isfinite(err):
                if h <= 1e-14 * max(1.0, abs(x)):
                    return states, renorm, vmax, nsteps, STATUS_NONFINITE, x
                hs = 0.2 * h
                continue
            if err <= 1.0:
                x = xn
                nsteps += 1
                for i in range(n):
                    y[i] = yn[i]
                    k1[i] = k7[i]
                if abs(y[4]) > RENORM or abs(y[5]) > RENORM:
                    y[4] *= RENORM_INV
                    y[5] *= RENORM_INV
                    y[6] *= RENORM_INV * RENORM_INV
                    y[7] *= RENORM_INV
                    k1[4] *= RENORM_INV
                    k1[5] *= RENORM_INV
                    k1[6] *= RENORM_INV * RENORM_INV
                    k1[7] *= RENORM_INV
                    vmax *= RENORM_INV
                    nren += 1
                av = abs(y[4])
                if av > vmax:
                    vmax = av
                fac = 5.0 if err == 0.0 else 0.9 * err ** -0.2
                fac = min(5.0, max(0.2, fac))
                if not last:
                    hs = h * fac
                elif fac < 1.0:
                    hs = min(hs, h * fac)
            else:
                hs = h * max(0.2, 0.9 * err ** -0.2)
        for i in range(n):
            states[j, i] = y[i]
        renorm[j] = nren
    return states, renorm, vmax, nsteps, STATUS_OK, x
