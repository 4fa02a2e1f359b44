"""Numba switch.

Set ``BCSGAP_DISABLE_NUMBA=1`` to route every hot kernel through its
pure-numpy implementation. When numba is not importable the numpy path is
used regardless of the flag.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("BCSGAP_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag not in ("1", "true", "yes", "on")

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "error_model": "numpy",
}


def njit(func):
    """Compile ``func`` with the package defaults, or return it untouched."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(**numba_default)(func)
