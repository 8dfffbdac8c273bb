"""Backend selection for the compiled kernels.

Numba is used when it is importable and ``PHOTON_CONDENSATE_NUMBA`` is not
set to a false value (``0``, ``false``, ``no``, ``off``). Otherwise every
kernel runs on its pure-numpy path. The choice is made once at import.
"""
from __future__ import annotations

import os

_FALSE = {"0", "false", "no", "off"}

ENV_FLAG = "PHOTON_CONDENSATE_NUMBA"

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is optional
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(ENV_FLAG, "1").strip().lower() not in _FALSE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is present, an identity decorator otherwise.

    Compiling is independent of :data:`USE_NUMBA` so that the benchmark can
    time both paths in one process; dispatch happens in :mod:`kernels`.
    """
    if _numba is not None:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
