"""Numba switch shared by every hot kernel in the package.

Set ``PUSHPULL_DISABLE_NUMBA=1`` to run the pure numpy/Python paths instead
of the compiled ones. The flag is read once, at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("PUSHPULL_DISABLE_NUMBA", "").strip().lower() in _FALSY


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise.

    The undecorated function stays reachable as ``.py_func`` in both modes so
    benchmarks can time the two paths side by side.
    """
    kwargs.setdefault("cache", True)

    def wrap(fn):
        if USE_NUMBA:
            return _numba.njit(**kwargs)(fn)
        fn.py_func = fn
        return fn

    if args and callable(args[0]):
        return wrap(args[0])
    return wrap


def compiled(fn):
    """Force-compile ``fn`` regardless of the env flag (benchmarks only)."""
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    return _numba.njit(cache=True)(getattr(fn, "py_func", fn))
