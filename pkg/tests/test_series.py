import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore.characters import CoefficientCast, builtin_cast
from rhexplore.series import (EulerFactorSource, FunctionSource, ListSource, MultiplicativeSource,
                              PeriodicSource, SeriesFunction, coefficient_walk, convergence_steps,
                              default_terms, eta_transform, euler_partial_product, eval_partial,
                              load_coefficients, save_coefficients)


def test_partial_sum_zeta2():
    src = PeriodicSource(CoefficientCast(1, [1]))
    val = eval_partial(src, 2.0, 100000)
    assert abs(val - math.pi ** 2 / 6) < 1.1e-5


def test_trail_endpoint():
    src = ListSource(builtin_cast("morse_thue", 100))
    v, trail = eval_partial(src, 0.5 + 10j, 100, want_trail=True)
    assert abs(trail.sums[-1] - v) < 1e-12 and trail.sums.size == 100


def test_euler_product_matches_series_far_right():
    src = PeriodicSource(CoefficientCast(4, [0, 1, 0, -1]))
    chi = lambda p: [0, 1, 0, -1][p % 4]
    a = euler_partial_product(chi, 3.0, 5000)
    b = eval_partial(src, 3.0, 200000)
    assert abs(a - b) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 300), st.integers(2, 300))
def test_multiplicative_source_complete(m, n):
    src = MultiplicativeSource(lambda p: complex(math.cos(p), math.sin(p)))
    a = src.coeffs(m * n)
    assert abs(a[m * n - 1] - a[m - 1] * a[n - 1]) < 1e-9


def test_euler_factor_source_tau():
    from rhexplore.arithmetic import ramanujan_tau
    src = EulerFactorSource(lambda p: (ramanujan_tau(p), p ** 11))
    a = src.coeffs(30)
    assert [int(round(v.real)) for v in a[:10]] == [ramanujan_tau(n) for n in range(1, 11)]


def test_eta_transform_alternates():
    src = eta_transform(PeriodicSource(CoefficientCast(1, [1])))
    assert np.allclose(src.coeffs(6).real, [1, -1, 1, -1, 1, -1])


def test_function_source():
    src = FunctionSource(lambda n: 1.0 / n)
    assert np.allclose(src.coeffs(4), [1, 0.5, 1 / 3, 0.25])


def test_default_terms_grows():
    assert default_terms(0.5 + 10j) == 2000
    assert default_terms(0.5 + 1000j) >= 20000


def test_series_function_band_truncation():
    f = SeriesFunction(ListSource(builtin_cast("morse_thue", 50000)))
    z = np.array([0.5 + 20j, 0.5 + 500j])
    vals = f(z)
    line = f.on_line(0.5, 20.0, 480.0, 2)
    assert np.allclose(vals, line, atol=1e-10)
    assert f.terms_used(0.5 + 500j) >= f.terms_used(0.5 + 20j)


def test_convergence_steps_monotone_eps():
    src = PeriodicSource(CoefficientCast(6, [0, 1, 0, 0, 0, -1]))
    z = 2.0 + 5j
    loose = convergence_steps(src, z, eps=1.0, N_max=2000)
    assert loose <= 2000


def test_walk():
    assert coefficient_walk(ListSource([1, -1, 1]), 3).real.tolist() == [1, 0, 1]


def test_coefficient_file_roundtrip(tmp_path):
    vals = np.array([1, 2 - 1j, -0.5j])
    save_coefficients(vals, tmp_path / "a.txt")
    assert np.allclose(load_coefficients(tmp_path / "a.txt"), vals)


def test_list_source_exhausted():
    with pytest.raises(ValueError):
        ListSource([1, 2]).coeffs(5)
