"""Selects the compiled (numba) or pure-numpy implementation of hot kernels.

Set ``PUMPNET_DISABLE_NUMBA=1`` to force the numpy path, e.g. for debugging
or on platforms where numba is unavailable. Both paths return identical
results to rounding.
"""
import os

_FLAG = os.environ.get("PUMPNET_DISABLE_NUMBA", "").strip().lower()

USE_NUMBA = _FLAG not in ("1", "true", "yes", "on")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:
    njit = numba.njit(cache=True, fastmath=False)
else:
    def njit(func):
        return func


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
