"""Backend switch for the hot kernels.

Set ``MUNTZLAB_BACKEND=numpy`` to force the pure-numpy path. The default
is numba when it imports cleanly.
"""
import os

BACKEND_ENV = "MUNTZLAB_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = False
if _requested == "numba":
    try:
        import numba as _nb

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is optional
        HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(func):
    """``numba.njit(cache=True)`` if numba is active, else identity."""
    if HAVE_NUMBA:
        return _nb.njit(cache=True)(func)
    return func
