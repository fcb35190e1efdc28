"""Conversion between dimensional and non-dimensional variables.

Lengths scale with (Q^2/g)^{1/3}, the stream function with Q, the vorticity
as omega(Psi) = (Q/g^2)^{1/3} upsilon(Q Psi), and the head as r = R/R_c with
R_c = (3/2) (Q g)^{2/3}.
"""

import math

import numpy as np

from .errors import ConfigurationError, DomainError
from .vorticity import make_spec


def _check(Q, g):
    if not (math.isfinite(Q) and math.isfinite(g)):
        raise DomainError("Q and g must be finite")
    if Q == 0.0:
        raise DomainError("Q = 0 (zero rate of flow) cannot be scaled")
    if g <= 0.0:
        raise DomainError("g must be positive")


def length_scale(Q, g):
    _check(Q, g)
    return (Q * Q / g) ** (1.0 / 3.0)


def head_scale(Q, g):
    _check(Q, g)
    return 1.5 * abs(Q * g) ** (2.0 / 3.0)


def _vort_factor(Q, g):
    return float(np.cbrt(Q / (g * g)))


def _map_descriptor(desc, Q, g, forward):
    kind = str(desc.get("kind", "")).lower()
    f = _vort_factor(Q, g)
    if kind in ("zero", "irrotational"):
        return {"kind": "zero"}
    if kind == "constant":
        b = float(desc["b"])
        return {"kind": "constant", "b": b * f if forward else b / f}
    if kind == "linear":
        b = float(desc["b"])
        return {"kind": "linear", "b": b * f * Q if forward else b / (f * Q)}
    if kind == "polynomial":
        c = [float(x) for x in desc["coeffs"]]
        if forward:
            return {"kind": "polynomial", "coeffs": [ck * f * Q ** k for k, ck in enumerate(c)]}
        return {"kind": "polynomial", "coeffs": [ck / (f * Q ** k) for k, ck in enumerate(c)]}
    if kind == "tabulated":
        grid = np.asarray(desc["grid"], dtype=float)
        vals = np.asarray(desc["values"], dtype=float)
        if forward:
            grid, vals = grid / Q, vals * f
        else:
            grid, vals = grid * Q, vals / f
        order = np.argsort(grid)
        return {"kind": "tabulated", "grid": grid[order].tolist(), "values": vals[order].tolist()}
    raise ConfigurationError(f"unknown vorticity kind '{desc.get('kind')}'")


def nondimensional_descriptor(Q, g, upsilon):
    """Descriptor of omega for a dimensional vorticity descriptor ``upsilon``."""
    _check(Q, g)
    return _map_descriptor(upsilon, Q, g, True)


def scale_to_nondimensional(Q, g, upsilon, R):
    """Return ``(spec, r, descriptor)`` for dimensional (Q, g, upsilon, R).

    Raises
    ------
    DomainError
        Q = 0 or g <= 0.
    """
    desc = nondimensional_descriptor(Q, g, upsilon)
    return make_spec(desc), R / head_scale(Q, g), desc


def scale_to_dimensional(Q, g, omega, r):
    """Inverse map: ``(upsilon_descriptor, R)``."""
    _check(Q, g)
    return _map_descriptor(omega, Q, g, False), r * head_scale(Q, g)


def dimensional_wavelength(Q, g, lambda0):
    return length_scale(Q, g) * lambda0
