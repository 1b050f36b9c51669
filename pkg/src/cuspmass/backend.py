"""Kernel backend selection.

Hot numeric kernels exist in two variants: a numba ``@njit`` build and a
pure-numpy build.  The environment variable ``CUSPMASS_NO_NUMBA`` (set to
``1``/``true``/``yes``) forces the numpy path; otherwise numba is used when
importable.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_flag = os.environ.get("CUSPMASS_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in ("1", "true", "yes", "on")

try:
    if NUMBA_DISABLED:
        raise ImportError
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:
    _njit = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


def njit(*args, **kwargs):
    """numba.njit with caching; identity decorator when numba is off.

    Functions decorated with this must only be called through the dispatch
    layer in :mod:`cuspmass.kernels`, which falls back to the numpy
    implementations when ``USE_NUMBA`` is false.
    """
    if USE_NUMBA:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
