"""Backend selection for the Dirichlet-polynomial kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used.  Setting RHEXPLORE_PURE_PYTHON=1 forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("RHEXPLORE_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "numpy"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "numpy"

_threads = 1


def set_threads(n):
    global _threads
    _threads = max(1, int(n))


def get_threads():
    return _threads


def dirichlet_points(c, logb, s, backend=None):
    """sum_j c_j exp(-s L_j) for each s (1-d complex array)."""
    impl = _pick(backend)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    logb = np.ascontiguousarray(logb, dtype=np.complex128)
    s = np.ascontiguousarray(np.atleast_1d(s), dtype=np.complex128).ravel()
    return np.asarray(impl.dirichlet_points(c, logb, s, _threads))


def dirichlet_line(c, logb, x, y0, dy, ny, backend=None):
    """Same sum on the vertical grid x + i(y0 + k dy), k = 0..ny-1."""
    impl = _pick(backend)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    logb = np.ascontiguousarray(logb, dtype=np.complex128)
    return np.asarray(impl.dirichlet_line(c, logb, float(x), float(y0), float(dy), int(ny), _threads))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "numpy":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
