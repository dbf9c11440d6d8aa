"""Hot numeric kernels with two interchangeable backends.

The numba backend (JIT, nogil) is used when available; a pure-numpy
implementation provides the fallback. Selection order:

  1. ``set_backend("numba"|"numpy")`` called explicitly (tests, benchmarks);
  2. the ``PAPR_LAB_BACKEND`` environment variable (same values, or ``auto``);
  3. auto: numba if it imports, else numpy.

Both backends consume the caller-supplied random sign array in the same
order, so a fixed seed gives the same experiment under either backend up
to floating-point associativity.
"""
from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "PAPR_LAB_BACKEND"
_backend_name = None
_impl = None


def _load(name: str):
    if name == "numba":
        from . import _numba as mod
    elif name == "numpy":
        from . import _numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    return mod


def set_backend(name: str | None) -> str | None:
    """Force a backend; None clears the choice (next call re-resolves lazily)."""
    global _backend_name, _impl
    if name is None:
        _backend_name = None
        _impl = None
        return None
    _impl = _load(name)
    _backend_name = name
    return name


def active_backend() -> str:
    """Resolve (once) and return the name of the backend in use."""
    global _backend_name, _impl
    if _impl is None:
        requested = os.environ.get(_ENV_VAR, "auto").lower()
        if requested in ("numba", "numpy"):
            _impl = _load(requested)
            _backend_name = requested
        elif requested == "auto":
            try:
                _impl = _load("numba")
                _backend_name = "numba"
            except ImportError:
                _impl = _load("numpy")
                _backend_name = "numpy"
        else:
            raise ValueError(f"{_ENV_VAR}={requested!r} not understood (numba|numpy|auto)")
    return _backend_name


def tail_sign_count(n: int, start_index: int, shots: int, paired: bool) -> int:
    """Length of the random ±1 array one selection run consumes."""
    width = n - start_index
    per_candidate = shots * (width * (width - 1)) // 2
    return per_candidate if paired else 2 * per_candidate


def select_block(w: np.ndarray, grid_size: int, start_index: int, shots: int,
                 tail_signs: np.ndarray, paired: bool = True):
    """Run the sequential selection for one block; see selector.select_signs."""
    active_backend()
    return _impl.select_block(
        np.ascontiguousarray(w, dtype=np.complex128), grid_size,
        start_index, shots, np.ascontiguousarray(tail_signs, dtype=np.int8), paired,
    )


def exact_cf(w: np.ndarray, grid_size: int, prefix: np.ndarray) -> float:
    """Exact conditional CF given a decided-sign prefix (full enumeration)."""
    active_backend()
    return _impl.exact_cf(
        np.ascontiguousarray(w, dtype=np.complex128), grid_size,
        np.ascontiguousarray(prefix, dtype=np.int8),
    )


def exhaustive_best(w: np.ndarray, grid_size: int):
    """Best sign vector (first sign +1) by full enumeration."""
    active_backend()
    return _impl.exhaustive_best(np.ascontiguousarray(w, dtype=np.complex128), grid_size)


def warmup() -> None:
    """Precompile the numba kernels if that backend is active."""
    if active_backend() == "numba":
        _impl.warmup()
