"""Vorticity functions omega(U), their derivative and primitive.

A :class:`VorticitySpec` is built from a plain descriptor mapping::

    {"kind": "zero"}
    {"kind": "constant", "b": 2.0}
    {"kind": "linear", "b": 1.0}                 # omega(t) = b*t
    {"kind": "polynomial", "coeffs": [c0, c1, ...]}
    {"kind": "tabulated", "grid": [...], "values": [...]}

Tabulated data are interpolated with a not-a-knot cubic spline. Outside the
grid the spline is continued linearly, and streams that reach that region
are flagged by the callers.
"""

from dataclasses import dataclass, field
import math
from typing import Any, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError
from .kernels import KIND_POLY, KIND_SPLINE

KINDS = ("zero", "constant", "linear", "polynomial", "tabulated")

# omega' is bounded on this window for polynomial descriptors of degree >= 2
_POLY_LIPSCHITZ_WINDOW = (-5.0, 5.0)


@dataclass(frozen=True, eq=False)
class VorticitySpec:
    """Validated vorticity function.

    ``omega``, ``omega_prime`` and ``Omega`` accept scalars or arrays.
    ``Omega(t)`` is the primitive of ``omega`` vanishing at 0.
    """

    kind: str
    params: Mapping[str, Any]
    lipschitz_bound: float
    code: int = field(repr=False)
    coef: np.ndarray = field(repr=False)
    knots: np.ndarray = field(repr=False)
    _spline: Any = field(default=None, repr=False)
    _prim_knots: Any = field(default=None, repr=False)

    @property
    def grid_range(self):
        """(lo, hi) of the tabulation grid, or None for analytic kinds."""
        if self.code == KIND_SPLINE:
            return float(self.knots[0]), float(self.knots[-1])
        return None

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        if self.code == KIND_POLY:
            return npoly.polyval(t, self.coef[0])
        return self._spline_parts(t)[0]

    def omega_prime(self, t):
        t = np.asarray(t, dtype=float)
        if self.code == KIND_POLY:
            return npoly.polyval(t, npoly.polyder(self.coef[0]))
        return self._spline_parts(t)[1]

    def Omega(self, t):
        t = np.asarray(t, dtype=float)
        if self.code == KIND_POLY:
            return npoly.polyval(t, npoly.polyint(self.coef[0]))
        return self._spline_primitive(t) - self._spline_primitive(np.asarray(0.0))

    def extrapolates(self, lo, hi):
        """True if [lo, hi] leaves the tabulated grid."""
        r = self.grid_range
        return r is not None and (lo < r[0] or hi > r[1])

    def _spline_parts(self, t):
        x0, x1 = self.knots[0], self.knots[-1]
        sp = self._spline
        w0, d0 = sp(x0), sp(x0, 1)
        w1, d1 = sp(x1), sp(x1, 1)
        tc = np.clip(t, x0, x1)
        w = np.where(t < x0, w0 + d0 * (t - x0), np.where(t > x1, w1 + d1 * (t - x1), sp(tc)))
        wp = np.where(t < x0, d0, np.where(t > x1, d1, sp(tc, 1)))
        return w, wp

    def _spline_primitive(self, t):
        x0, x1 = self.knots[0], self.knots[-1]
        sp = self._spline
        anti = self._prim_knots
        w0, d0 = sp(x0), sp(x0, 1)
        w1, d1 = sp(x1), sp(x1, 1)
        tc = np.clip(t, x0, x1)
        inner = anti(tc)
        a0 = t - x0
        a1 = t - x1
        lower = anti(x0) + w0 * a0 + 0.5 * d0 * a0 * a0
        upper = anti(x1) + w1 * a1 + 0.5 * d1 * a1 * a1
        return np.where(t < x0, lower, np.where(t > x1, upper, inner))


def _as_float(desc, key):
    if key not in desc:
        raise ConfigurationError(f"vorticity descriptor is missing '{key}'")
    try:
        val = float(desc[key])
    except (TypeError, ValueError):
        raise ConfigurationError(f"vorticity field '{key}' must be a number") from None
    if not math.isfinite(val):
        raise ConfigurationError(f"vorticity field '{key}' must be finite")
    return val


def _as_array(desc, key):
    if key not in desc:
        raise ConfigurationError(f"vorticity descriptor is missing '{key}'")
    try:
        arr = np.asarray(desc[key], dtype=float).ravel()
    except (TypeError, ValueError):
        raise ConfigurationError(f"vorticity field '{key}' must be a list of numbers") from None
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"vorticity field '{key}' must be a non-empty list of finite numbers")
    return arr


_ALLOWED = {
    "zero": {"kind"},
    "constant": {"kind", "b"},
    "linear": {"kind", "b"},
    "polynomial": {"kind", "coeffs"},
    "tabulated": {"kind", "grid", "values"},
}


def make_spec(descriptor: Mapping[str, Any]) -> VorticitySpec:
    """Validate a descriptor and build the corresponding spec.

    Raises
    ------
    ConfigurationError
        Unknown kind, unknown or missing fields, or invalid values.
    """
    if not isinstance(descriptor, Mapping):
        raise ConfigurationError("vorticity descriptor must be a mapping")
    kind = str(descriptor.get("kind", "")).strip().lower()
    if kind == "irrotational":
        kind = "zero"
    if kind not in KINDS:
        raise ConfigurationError(f"unknown vorticity kind '{descriptor.get('kind')}'; expected one of {KINDS}")
    extra = set(descriptor) - _ALLOWED[kind]
    if extra:
        raise ConfigurationError(f"unknown vorticity field(s) for kind '{kind}': {sorted(extra)}")

    if kind == "zero":
        return _poly_spec(kind, {}, np.array([0.0]))
    if kind == "constant":
        b = _as_float(descriptor, "b")
        return _poly_spec(kind, {"b": b}, np.array([b]))
    if kind == "linear":
        b = _as_float(descriptor, "b")
        return _poly_spec(kind, {"b": b}, np.array([0.0, b]))
    if kind == "polynomial":
        c = _as_array(descriptor, "coeffs")
        return _poly_spec(kind, {"coeffs": c.tolist()}, c)

    grid = _as_array(descriptor, "grid")
    values = _as_array(descriptor, "values")
    if grid.size != values.size:
        raise ConfigurationError("tabulated 'grid' and 'values' must have the same length")
    if grid.size < 4:
        raise ConfigurationError("tabulated vorticity needs at least 4 grid points")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("tabulated 'grid' must be strictly increasing")
    if grid[0] > 0.0 or grid[-1] < 1.0:
        raise ConfigurationError("tabulated 'grid' must cover [0, 1]")
    sp = CubicSpline(grid, values, bc_type="not-a-knot", extrapolate=True)
    dense = np.linspace(grid[0], grid[-1], 64 * grid.size)
    lip = float(np.max(np.abs(sp(dense, 1))))
    return VorticitySpec(
        kind=kind,
        params={"grid": grid.tolist(), "values": values.tolist()},
        lipschitz_bound=lip,
        code=KIND_SPLINE,
        coef=np.ascontiguousarray(sp.c, dtype=float),
        knots=np.ascontiguousarray(grid),
        _spline=sp,
        _prim_knots=sp.antiderivative(),
    )


def _poly_spec(kind, params, coeffs):
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size == 0:
        coeffs = np.array([0.0])
    if coeffs.size <= 2:
        lip = abs(coeffs[1]) if coeffs.size == 2 else 0.0
    else:
        t = np.linspace(*_POLY_LIPSCHITZ_WINDOW, 2001)
        lip = float(np.max(np.abs(npoly.polyval(t, npoly.polyder(coeffs)))))
    return VorticitySpec(
        kind=kind,
        params=params,
        lipschitz_bound=float(lip),
        code=KIND_POLY,
        coef=np.ascontiguousarray(coeffs.reshape(1, -1)),
        knots=np.zeros(1),
    )


def _golden_max(f, a, b, tol=1e-14, max_iter=200):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def compute_s0(spec: VorticitySpec, n_scan: int = 4096):
    """Return ``(s0, tau_max)`` with ``s0 = sqrt(2 max_[0,1] Omega)``.

    ``tau_max`` is the maximiser of Omega on [0, 1] (dense scan plus
    golden-section refinement of the best cell).
    """
    t = np.linspace(0.0, 1.0, n_scan + 1)
    vals = spec.Omega(t)
    i = int(np.argmax(vals))
    best_t, best = float(t[i]), float(vals[i])
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, n_scan)]
    x, fx = _golden_max(lambda u: float(spec.Omega(u)), lo, hi)
    if fx > best:
        best_t, best = x, fx
    best = max(best, 0.0)
    if best == 0.0:
        best_t = 0.0
    return math.sqrt(2.0 * best), best_t
