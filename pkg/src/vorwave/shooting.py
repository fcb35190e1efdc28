"""Python-side wrapper around the jitted shooting kernel."""

from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import IntegrationError
from .tolerances import resolve

_STATUS_TEXT = {
    K.STATUS_UNDERFLOW: "step size underflow",
    K.STATUS_MAXSTEPS: "maximum number of steps exceeded",
    K.STATUS_NONFINITE: "non-finite state",
}


@dataclass
class Shot:
    x: np.ndarray
    states: np.ndarray
    renorm: np.ndarray
    vmax: float
    nsteps: int

    @property
    def final(self):
        return self.states[-1]


def shoot(spec, y0, x0, x_out, tau2=0.0, flags=0, tol=None):
    """Integrate the augmented state from ``x0`` through ``x_out``.

    Raises
    ------
    IntegrationError
        With ``last_y`` set to the last accepted abscissa.
    """
    tol = resolve(tol)
    x_out = np.ascontiguousarray(np.atleast_1d(np.asarray(x_out, dtype=float)))
    y0 = np.ascontiguousarray(np.asarray(y0, dtype=float))
    states, renorm, vmax, nsteps, status, x_last = K.dopri5(
        y0, float(x0), x_out, spec.code, spec.coef, spec.knots, float(tau2), int(flags),
        tol.ode_rtol, tol.ode_atol, int(tol.max_steps),
    )
    if status != K.STATUS_OK:
        raise IntegrationError(
            f"shooting failed: {_STATUS_TEXT.get(int(status), 'unknown')} at Y={x_last:.17g}",
            last_y=float(x_last),
        )
    return Shot(x_out, states, renorm, float(vmax), int(nsteps))


def initial_state(p, u0=0.0):
    y = np.zeros(K.NSTATE)
    y[0] = u0
    y[1] = p
    y[3] = 1.0
    y[5] = 1.0
    return y
