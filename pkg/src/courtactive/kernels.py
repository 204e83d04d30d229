"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``COURTACTIVE_PURE=1``
to force the numpy fallback. Both backends share one calling convention and
this module normalizes dtypes before dispatch.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _kernels_py


def _load_backend() -> tuple[ModuleType, str]:
    if os.environ.get("COURTACTIVE_PURE") == "1":
        return _kernels_py, "python"
    try:
        from . import _ckernels
    except ImportError:
        return _kernels_py, "python"
    return _ckernels, "cython"


_backend, BACKEND = _load_backend()


def use_backend(name: str) -> None:
    """Switch backend at runtime ("cython" or "python"); used by tests and benchmarks."""
    global _backend, BACKEND
    if name == "python":
        _backend, BACKEND = _kernels_py, "python"
    elif name == "cython":
        from . import _ckernels

        _backend, BACKEND = _ckernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return names
    return ["cython", *names]


def _u8(cond) -> np.ndarray:
    return np.ascontiguousarray(cond, dtype=np.uint8)


def _i64(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.int64)


def run_spans(cond, t, period: int) -> tuple[np.ndarray, np.ndarray]:
    return _backend.run_spans(_u8(cond), _i64(t), int(period))


def fill_spans(n: int, starts, ends) -> np.ndarray:
    return _backend.fill_spans(int(n), _i64(starts), _i64(ends)).view(bool)


def mark_long_runs(cond, t, period: int, min_duration: int) -> np.ndarray:
    """Mark every frame of each maximal run lasting at least ``min_duration`` ms."""
    return _backend.mark_long_runs(_u8(cond), _i64(t), int(period), int(min_duration)).view(bool)


def assign_ord(codes, transition: int) -> np.ndarray:
    return _backend.assign_ord(np.ascontiguousarray(codes, dtype=np.int8), transition)
