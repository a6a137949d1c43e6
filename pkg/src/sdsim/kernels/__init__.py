"""Integration kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time: numba when it imports cleanly,
unless ``SDSIM_DISABLE_JIT`` is set to a non-empty value other than ``0``.
``SDSIM_BACKEND=numpy|numba`` forces a choice. Both backends return
bit-identical results; ``benchmarks/bench_backends.py`` compares their speed.
"""

import os

from . import _numpy

BACKENDS = {"numpy": _numpy}

try:
    from . import _numba
except ImportError:  # numba missing or broken
    _numba = None
else:
    BACKENDS["numba"] = _numba


def _select() -> str:
    forced = os.environ.get("SDSIM_BACKEND", "").strip().lower()
    if forced:
        if forced not in BACKENDS:
            raise RuntimeError(f"SDSIM_BACKEND={forced!r} is not available (have {sorted(BACKENDS)})")
        return forced
    if os.environ.get("SDSIM_DISABLE_JIT", "").strip() not in ("", "0"):
        return "numpy"
    return "numba" if "numba" in BACKENDS else "numpy"


DEFAULT_BACKEND = _select()


def get_backend(name: str | None = None):
    return BACKENDS[name or DEFAULT_BACKEND]
