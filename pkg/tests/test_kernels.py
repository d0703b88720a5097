import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore import kernels
from rhexplore.series import log_n

have_c = kernels.BACKEND == "cython"


@pytest.mark.skipif(not have_c, reason="compiled kernel not built")
@settings(max_examples=30, deadline=None)
@given(st.integers(1, 400), st.floats(-1, 3), st.floats(0, 500))
def test_backends_agree_points(N, x, y):
    rng = np.random.Generator(np.random.PCG64(N))
    c = rng.normal(size=N) + 1j * rng.normal(size=N)
    s = np.array([x + 1j * y, x - 1j * y, 2 + 0j])
    a = kernels.dirichlet_points(c, log_n(N), s, backend="numpy")
    b = kernels.dirichlet_points(c, log_n(N), s, backend="cython")
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(c).sum())


@pytest.mark.skipif(not have_c, reason="compiled kernel not built")
@settings(max_examples=20, deadline=None)
@given(st.integers(1, 300), st.floats(-1, 3), st.floats(0, 300), st.integers(1, 200))
def test_backends_agree_line(N, x, y0, ny):
    c = np.ones(N, dtype=complex)
    a = kernels.dirichlet_line(c, log_n(N), x, y0, 0.01, ny, backend="numpy")
    b = kernels.dirichlet_line(c, log_n(N), x, y0, 0.01, ny, backend="cython")
    assert np.allclose(a, b, rtol=1e-11, atol=1e-11 * N)


def test_line_matches_points():
    N = 500
    c = np.exp(1j * np.arange(N))
    ys = 10 + 0.05 * np.arange(100)
    line = kernels.dirichlet_line(c, log_n(N), 0.7, 10.0, 0.05, 100)
    pts = kernels.dirichlet_points(c, log_n(N), 0.7 + 1j * ys)
    assert np.allclose(line, pts, rtol=1e-11, atol=1e-11)


def test_complex_logs_supported():
    logb = np.log(np.array([1, 2 + 0.5j, 3], dtype=complex))
    c = np.array([1, -1, 1], dtype=complex)
    s = np.array([0.5 + 3j])
    direct = sum(ci * np.exp(-s[0] * li) for ci, li in zip(c, logb))
    assert abs(kernels.dirichlet_points(c, logb, s)[0] - direct) < 1e-13


def test_thread_setting():
    old = kernels.get_threads()
    kernels.set_threads(0)
    assert kernels.get_threads() == 1
    kernels.set_threads(old)
