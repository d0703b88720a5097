import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore.characters import CoefficientCast
from rhexplore.dynamics import (FamilyKind, FamilySpec, ZeroTrajectory, braid_summary, char5_cast,
                                char10_cast, family_series, load_trajectories, predicted_factor_zeros,
                                save_trajectories, semicircle_bases, solve_coeff_path, sweep)
from rhexplore.errors import DomainError, IllConditionedError
from rhexplore.lfunctions import ZetaFunction, dirichlet_spec
from rhexplore.modular import shipped_basis
from rhexplore.zeros import ScanConfig, ZeroClass, scan_zeros


def test_theta_grid_must_increase():
    with pytest.raises(DomainError):
        FamilySpec("eta_rotation", [0.0, 0.0])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 2 * math.pi - 0.01).filter(lambda t: abs(t - math.pi) > 1e-3))
def test_factor_zeros_vanish(theta):
    f = family_series(FamilySpec("eta_rotation", [theta]), theta)
    for z in predicted_factor_zeros(theta):
        assert abs(f.factor(z)) < 1e-12


def test_factor_degenerates_at_pi():
    with pytest.raises(DomainError):
        predicted_factor_zeros(math.pi)


def test_eta_rotation_limits():
    z = np.array([0.5 + 10j])
    zeta_val = ZetaFunction()(z)
    # theta = pi: factor is 1, so the family is zeta itself
    assert np.allclose(family_series(FamilySpec("eta_rotation", [0.0]), math.pi)(z), zeta_val)
    # theta = 0: (1 - 2^{1-z}) zeta = eta
    eta = (1 - 2 ** (1 - z)) * zeta_val
    assert np.allclose(family_series(FamilySpec("eta_rotation", [0.0]), 0.0)(z), eta)


def test_named_endpoints_of_rotations():
    assert np.allclose(char10_cast(math.pi / 2).values, dirichlet_spec(10, (10, 4)).source.cast.values)
    assert np.allclose(char10_cast(3 * math.pi / 2).values, dirichlet_spec(10, (10, 2)).source.cast.values)
    assert np.allclose(char5_cast(3 * math.pi / 2).values, dirichlet_spec(5, (5, 2)).source.cast.values)
    assert np.allclose(char5_cast(math.pi / 2).values, dirichlet_spec(5, (5, 4)).source.cast.values)


def test_semicircle_closes():
    c0, b0 = semicircle_bases(0.0, 5)
    c2, b2 = semicircle_bases(2.0, 5)
    assert np.allclose(b0, b2) and np.allclose(b0[1::2], [5, 11, 17, 23, 29])
    _, b1 = semicircle_bases(1.0, 5)
    assert np.allclose(b1[1::2], [4, 10, 16, 22, 28])


def test_semicircle_midpoint_is_cast():
    f = family_series(FamilySpec("base_semicircle", [0.0], {"terms": 600}), 1.0)
    # 300 pairs reach base 6*299 + 4
    n = np.arange(1, 1799)
    a = CoefficientCast(6, [0, 1, 0, 0, -1, 0]).array(1798)
    z = 1.5 + 4j
    assert abs(f(z) - np.sum(a * n ** (-z))) < 1e-9


def test_modular_family_on_critical_line():
    f = family_series(FamilySpec("modular_combination", [0.0], {"basis": shipped_basis(38)}), 1 / 8)
    zs = scan_zeros(f, ScanConfig((0, 1), (1, 12), 0.1, 0.05))
    assert len(zs) >= 4 and all(abs(z.re - 0.5) < 1e-6 for z in zs)


def test_sweep_endpoint_agreement():
    cfg = ScanConfig((0, 1), (0.5, 25))
    spec = FamilySpec("char_rotation_5", np.linspace(math.pi / 2, 3 * math.pi / 2, 17))
    trajs = sweep(spec, cfg)
    end = sorted((s[1] for t in trajs for s in t.samples if s[0] == spec.thetas[-1]), key=lambda w: w.imag)
    direct = sorted((z.location for z in scan_zeros(dirichlet_spec(5, (5, 2)), cfg)), key=lambda w: w.imag)
    assert len(end) == len(direct)
    assert max(abs(a - b) for a, b in zip(end, direct)) < 1e-4


def test_closed_loop_braid():
    spec = FamilySpec("char_rotation_10", np.linspace(math.pi / 2, 5 * math.pi / 2, 65), {"terms": 60})
    trajs = sweep(spec, ScanConfig((-2, 1), (1, 20), 0.05, 0.02))
    b = braid_summary(trajs, 2 * math.pi)
    assert sorted(b.permutation.values()) == sorted(set(b.permutation.values()))
    # zeros can cross the window edge mid-loop, so compare away from it
    start = sorted(s[1].imag for t in trajs for s in t.samples if s[0] == spec.thetas[0] and 2 < s[1].imag < 18)
    end = sorted(s[1].imag for t in trajs for s in t.samples if s[0] == spec.thetas[-1] and 2 < s[1].imag < 18)
    assert np.allclose(start, end, atol=1e-8)


def test_braid_needs_closed_loop():
    t = ZeroTrajectory(0, [(0.0, 0.5 + 1j, ZeroClass.critical), (1.0, 0.5 + 1.1j, ZeroClass.critical)])
    with pytest.raises(DomainError):
        braid_summary([t], 2 * math.pi)


def test_braid_counts_exchanges():
    t = ZeroTrajectory(0, [(0.0, 0.5 + 1j, ZeroClass.critical), (0.5, 0.2 + 1j, ZeroClass.off_critical),
                           (1.0, -0.5 + 1j, ZeroClass.gollum), (2.0, 0.5 + 1j, ZeroClass.critical)])
    assert braid_summary([t], 2.0).exchanges == 2


def test_trajectory_csv_roundtrip(tmp_path):
    t = ZeroTrajectory(3, [(0.0, 0.5 + 1j, ZeroClass.critical), (0.1, 0.4 + 1.2j, ZeroClass.off_critical)])
    save_trajectories([t], tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "traj_id,theta,re,im,class"
    back = load_trajectories(tmp_path / "t.csv")
    assert back[0].id == 3 and back[0].samples == t.samples


@pytest.fixture(scope="module")
def l52_zeros():
    zs = scan_zeros(dirichlet_spec(5, (5, 2)), ScanConfig((0.4, 0.6), (-120, 120)))
    return sorted((z.location for z in zs), key=lambda w: (abs(w.imag), w.imag))


def test_coeff_path_recovers_character(l52_zeros):
    res = solve_coeff_path(l52_zeros, [w.conjugate() for w in l52_zeros], 0.0, 30)
    assert res.residuals.max() < 1e-8
    chi = CoefficientCast(5, [0, 1, -1j, 1j, -1]).array(10)
    assert np.abs(res.coeffs[:10] - chi).max() < 0.01


def test_coeff_path_conjugate_endpoint(l52_zeros):
    conj = [w.conjugate() for w in l52_zeros]
    a = solve_coeff_path(l52_zeros, conj, 0.0, 30)
    b = solve_coeff_path(l52_zeros, conj, 1.0, 30)
    assert np.allclose(b.coeffs, a.coeffs.conj(), atol=1e-9)


def test_coeff_path_ill_conditioned(l52_zeros):
    with pytest.raises(IllConditionedError):
        solve_coeff_path(l52_zeros, l52_zeros, 0.5, 30, max_condition=1e3)


def test_coeff_path_needs_zeros():
    with pytest.raises(DomainError):
        solve_coeff_path([0.5 + 14j], [0.5 + 14j], 0.5, 30)
