"""Optional numba acceleration.

Set ``VORWAVE_NO_NUMBA=1`` to run every kernel as plain Python/numpy code.
The same source is used on both paths.
"""

import os

_DISABLED = os.environ.get("VORWAVE_NO_NUMBA", "0").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False
    _numba_njit = None


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)

    def decorator(func):
        return func

    if len(args) == 1 and callable(args[0]):
        return args[0]
    return decorator
