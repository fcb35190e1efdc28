"""Composite Gauss-Legendre quadrature on geometrically graded panels."""

import numpy as np

from .errors import QuadratureError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(64)


def _breakpoints(a, b, focus, levels, split):
    pts = [a, b]
    width = b - a
    for f in focus:
        if not (a <= f <= b):
            continue
        pts.append(f)
        for k in range(1, levels + 1):
            d = width * 2.0 ** -k
            if f - d > a:
                pts.append(f - d)
            if f + d < b:
                pts.append(f + d)
    pts = np.unique(np.asarray(pts, dtype=float))
    if split > 1:
        fr = np.linspace(0.0, 1.0, split + 1)[:-1]
        pts = np.concatenate([(pts[:-1, None] + np.diff(pts)[:, None] * fr[None, :]).ravel(), pts[-1:]])
    return pts


def graded_gauss(f, a, b, focus=(), rtol=1e-10, levels=44, max_split=64):
    """Integrate ``f`` over [a, b] with panels graded towards ``focus`` points.

    The panel count is doubled until two successive estimates agree to
    ``rtol`` (relative to max(1, |I|)). ``f`` must accept arrays.
    """
    if b == a:
        return 0.0
    if b < a:
        return -graded_gauss(f, b, a, focus, rtol, levels, max_split)
    prev = None
    split = 1
    while split <= max_split:
        pts = _breakpoints(a, b, focus, levels, split)
        lo, hi = pts[:-1], pts[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        vals = f(x)
        est = float(np.sum(half[:, None] * _WEIGHTS[None, :] * vals))
        if not np.isfinite(est):
            raise QuadratureError("non-finite integrand on quadrature nodes")
        if prev is not None and abs(est - prev) <= rtol * max(1.0, abs(est)):
            return est
        prev = est
        split *= 2
    raise QuadratureError(f"quadrature did not converge to {rtol:g} (last estimate {prev!r})")
