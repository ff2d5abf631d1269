"""Numba switch.

Hot kernels are compiled with ``numba.njit`` when numba is importable and the
``QFACE_DISABLE_NUMBA`` environment variable is unset (or ``0``). Otherwise the
pure-numpy implementations in :mod:`qface.kernels` are used. The flag is read
once, at import time.
"""

import os

DISABLE_ENV = "QFACE_DISABLE_NUMBA"

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False
    _njit = None


def _env_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def jit(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAVE_NUMBA:
        return func
    return _njit(cache=True, nogil=True)(func)
