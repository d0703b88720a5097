import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore.errors import DomainError
from rhexplore.lfunctions import ZetaFunction, dirichlet_spec
from rhexplore.zeros import (Derivative, ScanConfig, Zero, ZeroClass, classify, gue_cdf, gue_density,
                             level_mean_root, load_zeros, mean_real, newton_refine, pair_correlation,
                             riemann_count_main, s_of_T, save_zeros, scan_zeros, spacing_stats)


@pytest.fixture(scope="module")
def zeta_zeros():
    return scan_zeros(ZetaFunction(), ScanConfig((0.4, 0.6), (10, 600)))


def test_first_zeros():
    zs = scan_zeros(ZetaFunction(), ScanConfig((0, 1), (10, 33)))
    assert np.allclose([z.im for z in zs], [14.134725141734693, 21.022039638771555, 25.010857580145688,
                                            30.424876125859513, 32.935061587739190], atol=1e-9)
    assert all(z.zclass is ZeroClass.critical and not z.multiple for z in zs)


def test_count_matches_main_term(zeta_zeros):
    n = len(zeta_zeros)
    assert abs(n - riemann_count_main(600.0)) < 3.2
    assert abs(n - riemann_count_main(600.0) - s_of_T(600.0)) < 0.5


def test_main_term_constant():
    assert abs(riemann_count_main(100.0) - 29.0023) < 1e-3
    assert abs(riemann_count_main(100.0, include_constant=False) - 28.1273) < 1e-3


def test_empty_window():
    zs = scan_zeros(ZetaFunction(), ScanConfig((2, 3), (10, 50)))
    assert len(zs) == 0


def test_config_validation():
    with pytest.raises(DomainError):
        ScanConfig((1, 0), (0, 1))
    with pytest.raises(DomainError):
        ScanConfig((0, 1), (0, 1), x_step=0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3))
def test_classify_bands(x):
    c = classify(complex(x, 10))
    if abs(x - 0.5) < 0.01:
        assert c is ZeroClass.critical
    elif abs(x) < 0.01:
        assert c is ZeroClass.axis_periodic
    elif x < 0:
        assert c is ZeroClass.gollum
    else:
        assert c is ZeroClass.off_critical


def test_newton_containment():
    cfg = ScanConfig((0, 1), (10, 20))
    z, res = newton_refine(lambda w: np.exp(w), np.array([0.5 + 15j]), cfg)
    assert not np.isfinite(res[0])


def test_double_zero_flag():
    f = lambda w: (np.asarray(w) - (0.5 + 3j)) ** 2
    zs = scan_zeros(f, ScanConfig((0, 1), (2, 4), newton_tol=1e-9))
    assert len(zs) >= 1 and zs[0].multiple


def test_derivative_zeros_right_of_line():
    zs = scan_zeros(Derivative(ZetaFunction()), ScanConfig((0.25, 3), (1, 60)))
    assert len(zs) > 5 and all(z.re > 0.5 for z in zs)


def test_mean_real_excludes_gollum():
    zs = [Zero(0.5 + 10j, 0, ZeroClass.critical), Zero(-1 + 12j, 0, ZeroClass.gollum),
          Zero(0.0 + 3j, 0, ZeroClass.axis_periodic), Zero(0.7 + 5j, 0, ZeroClass.off_critical)]
    assert abs(mean_real(zs) - 0.6) < 1e-12


def test_gue_density_integrates_to_one():
    s = np.linspace(0, 10, 20001)
    assert abs(np.trapezoid(gue_density(s), s) - 1) < 1e-6
    assert abs(gue_cdf(10.0) - 1) < 1e-12


def test_spacing_stats_gue(zeta_zeros):
    st_ = spacing_stats(zeta_zeros)
    assert abs(st_.mean - 1) < 0.1
    assert not st_.gue_rejected
    assert st_.ks_poisson > st_.ks_critical


def test_pair_correlation_shape(zeta_zeros):
    pc = pair_correlation(zeta_zeros, max_gap=2.0, bins=10)
    assert pc.r2[0] < 0.3 and pc.r2[-1] > 0.6


def test_too_few_for_stats():
    with pytest.raises(DomainError):
        spacing_stats([14.13, 21.02])


def test_zero_csv_roundtrip(tmp_path):
    zs = scan_zeros(dirichlet_spec(5, (5, 2)), ScanConfig((0, 1), (0, 20)))
    save_zeros(zs, tmp_path / "z.csv")
    back = load_zeros(tmp_path / "z.csv")
    assert [z.location for z in back] == [z.location for z in zs]
    assert [z.zclass for z in back] == [z.zclass for z in zs]


def test_level_root_in_range():
    r = level_mean_root(y_range=(20.0, 40.0), step=0.05)
    assert 0.3 < r < 0.9
