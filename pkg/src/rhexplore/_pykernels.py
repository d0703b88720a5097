"""Numpy fallback with the same interface as the compiled kernels."""
import numpy as np

_CHUNK = 1 << 22  # complex entries per temporary matrix


def dirichlet_points(c, logb, s, nthreads=1):
    c = np.ascontiguousarray(c, dtype=np.complex128)
    logb = np.ascontiguousarray(logb, dtype=np.complex128)
    s = np.ascontiguousarray(s, dtype=np.complex128)
    out = np.zeros(s.shape[0], dtype=np.complex128)
    if c.size == 0 or s.size == 0:
        return out
    rows = max(1, _CHUNK // c.size)
    for i in range(0, s.size, rows):
        blk = s[i:i + rows]
        out[i:i + rows] = np.exp(-np.outer(blk, logb)) @ c
    return out


def dirichlet_line(c, logb, x, y0, dy, ny, nthreads=1):
    s = x + 1j * (y0 + dy * np.arange(ny))
    return dirichlet_points(c, logb, s, nthreads)
