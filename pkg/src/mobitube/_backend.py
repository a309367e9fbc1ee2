"""Select the kernel backend.

Hot loops are compiled with numba when it is importable.  Setting the
environment variable ``MOBITUBE_NO_NUMBA=1`` (read once at import time) forces
the pure-numpy implementations, which compute the same quantities.
"""
import os

_DISABLED = os.environ.get("MOBITUBE_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by MOBITUBE_NO_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"
