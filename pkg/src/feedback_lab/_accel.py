"""Backend selection for the hot numeric kernels.

Two interchangeable backends exist for every kernel: a numba ``@njit``
compilation of the loop form, and a plain numpy form with vectorized
inner operations.  The active backend is chosen once at import time:

* ``FEEDBACK_LAB_NUMBA=0`` (or ``false``/``off``) forces the numpy backend.
* If numba is not importable the numpy backend is used automatically.
* Otherwise the numba backend is used.

``benchmarks/bench_kernels.py`` times the two backends side by side.
"""

import os

_FLAG = os.environ.get("FEEDBACK_LAB_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

try:
    import numba as _numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _numba = None
    HAS_NUMBA = False

NUMBA_ENABLED = HAS_NUMBA and _WANT_NUMBA


def njit_compile(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAS_NUMBA:
        return func
    return _numba.njit(cache=True)(func)


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
