"""Numba switch for the hot kernels.

Set ``LOCKSTEP_NO_NUMBA=1`` to run every kernel through its pure-numpy
fallback. The flag is read once at import time.
"""
import os

_DISABLED = os.environ.get("LOCKSTEP_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not _DISABLED

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
}


def njit(func):
    """Compile ``func`` with the default options, or return it untouched."""
    if not USE_NUMBA:
        return func
    return numba.njit(**numba_default)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
