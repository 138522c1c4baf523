"""Numba switch for the hot kernels.

Set ``OFDM_RELAY_DISABLE_NUMBA=1`` before import to run every kernel as
plain Python/numpy. The jitted and plain paths share one source, and the
plain function stays reachable as ``kernel.py_func`` either way.
"""

import os

_FLAG = "OFDM_RELAY_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLED_BY_ENV = os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}
HAS_NUMBA = numba is not None and not DISABLED_BY_ENV


def njit(func=None, **options):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""

    def wrap(f):
        if HAS_NUMBA:
            return numba.njit(cache=True, **options)(f)
        f.py_func = f
        return f

    if func is not None:
        return wrap(func)
    return wrap


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"
