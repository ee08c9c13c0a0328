"""Numba detection and backend selection.

Set ``WALKSCAN_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

import os

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def _env_disabled():
    return os.environ.get("WALKSCAN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
