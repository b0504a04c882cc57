"""Kernel backend selection.

The hot line-solve kernels are compiled with numba when it is importable and
``PADEADI_BACKEND`` is not set to ``numpy``.  With the numpy backend the same
kernels run as vectorized array code, which is slower but needs no compiler
and is handy for debugging.
"""
import os

_requested = os.environ.get("PADEADI_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(
        f"PADEADI_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    if _requested == "numba":
        import warnings

        import numba  # noqa: F401
        from numba import njit, prange

        # old system TBB: numba falls back to omp/workqueue by itself
        warnings.filterwarnings("ignore", message="The TBB threading layer")

        NUMBA_ENABLED = True
    else:
        raise ImportError
except ImportError:
    NUMBA_ENABLED = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    prange = range

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
