"""Optional numba acceleration.

Hot scalar kernels are decorated with :func:`jit`.  When numba is importable
and ``WLSURV_DISABLE_JIT`` is unset (or ``0``), ``jit`` is ``numba.njit``;
otherwise the kernels run as plain Python/numpy code with identical results.
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("WLSURV_DISABLE_JIT", "0").strip().lower()
JIT_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    if not JIT_REQUESTED:
        raise ImportError("jit disabled by WLSURV_DISABLE_JIT")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    _njit = None
    NUMBA_ENABLED = False


def jit(fn=None, **options):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if not NUMBA_ENABLED:
        if fn is None:
            return lambda f: f
        return fn
    options.setdefault("cache", True)
    options.setdefault("nogil", True)
    if fn is None:
        return _njit(**options)
    return _njit(**options)(fn)


__all__ = ["jit", "NUMBA_ENABLED", "JIT_REQUESTED"]
