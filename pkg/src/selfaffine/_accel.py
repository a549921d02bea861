"""Backend switch for the integer kernels.

``SELFAFFINE_BACKEND=numpy`` forces the pure-numpy code paths; the default
uses numba when it can be imported.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

ENV_FLAG = "SELFAFFINE_BACKEND"

_backend = os.environ.get(ENV_FLAG, "numba").strip().lower()
if _backend not in ("numba", "numpy"):
    raise ImportError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {_backend!r}")


def numba_available():
    return numba is not None


def use_numba():
    return _backend == "numba" and numba is not None


def get_backend():
    return "numba" if use_numba() else "numpy"


def set_backend(name):
    """Select the backend at runtime (tests and the benchmark use this)."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _backend = name


def njit(func):
    """Compile with numba when installed, otherwise leave the function as is."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)
