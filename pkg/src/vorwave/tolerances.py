"""Numerical tolerances with environment overrides.

``VORWAVE_ODE_RTOL``, ``VORWAVE_ODE_ATOL``, ``VORWAVE_QUAD_TOL`` and
``VORWAVE_ROOT_TOL`` override the defaults when set.
"""

from dataclasses import dataclass, replace
import math
import os

from .errors import ConfigurationError

_ENV = {
    "ode_rtol": "VORWAVE_ODE_RTOL",
    "ode_atol": "VORWAVE_ODE_ATOL",
    "quad_tol": "VORWAVE_QUAD_TOL",
    "root_tol": "VORWAVE_ROOT_TOL",
}


@dataclass(frozen=True)
class Tolerances:
    ode_rtol: float = 1e-12
    ode_atol: float = 1e-14
    quad_tol: float = 1e-10
    root_tol: float = 1e-12
    max_steps: int = 4_000_000

    def updated(self, **kw):
        for k, v in kw.items():
            if k not in _ENV and k != "max_steps":
                raise ConfigurationError(f"unknown tolerance '{k}'")
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigurationError(f"tolerance '{k}' must be a positive number")
        return replace(self, **kw)


def default_tolerances() -> Tolerances:
    """Defaults, with any environment overrides applied."""
    kw = {}
    for name, var in _ENV.items():
        raw = os.environ.get(var)
        if raw is None or raw.strip() == "":
            continue
        try:
            kw[name] = float(raw)
        except ValueError:
            raise ConfigurationError(f"{var} must be a number, got {raw!r}") from None
    return Tolerances().updated(**kw)


def resolve(tol):
    return default_tolerances() if tol is None else tol
