"""Backend selection for the hot kernels.

Set ``CALABI_GLUE_NO_NUMBA=1`` to force the pure-numpy path.
``CALABI_GLUE_THREADS`` caps the numba thread pool.
"""
import os

NO_NUMBA_ENV = "CALABI_GLUE_NO_NUMBA"
THREADS_ENV = "CALABI_GLUE_THREADS"

try:
    import numba as _numba
    # the bundled TBB is often too old; workqueue needs no external runtime
    _numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_use_numba = _numba is not None and os.environ.get(NO_NUMBA_ENV, "0") not in ("1", "true", "yes")


def numba_available():
    return _numba is not None


def using_numba():
    return _use_numba


def set_backend(name):
    """Switch between ``"numba"`` and ``"numpy"`` at runtime (used by the benchmark)."""
    global _use_numba
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and _numba is None:
        raise RuntimeError("numba is not installed")
    _use_numba = name == "numba"


def apply_thread_override():
    n = os.environ.get(THREADS_ENV)
    if n and _numba is not None:
        _numba.set_num_threads(max(1, min(int(n), _numba.config.NUMBA_NUM_THREADS)))
