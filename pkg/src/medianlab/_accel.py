"""Numba switch.

Kernels in :mod:`medianlab.kernels` come in two flavours: explicit loops
compiled with ``numba.njit`` and vectorised numpy code.  The numba path is
used when numba imports cleanly and ``MEDIANLAB_DISABLE_NUMBA`` is unset
(or set to ``0``/``false``).
"""
import os

_flag = os.environ.get("MEDIANLAB_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    import numba  # noqa: F401
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


USE_NUMBA = HAS_NUMBA and not DISABLED_BY_ENV
