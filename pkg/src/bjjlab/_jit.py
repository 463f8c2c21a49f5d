"""Numba switch.

Set ``BJJLAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The flag is
read once at import time.
"""
from __future__ import annotations

import os

_disabled = os.environ.get("BJJLAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


USE_NUMBA = NUMBA_AVAILABLE and not _disabled

__all__ = ["njit", "NUMBA_AVAILABLE", "USE_NUMBA"]
