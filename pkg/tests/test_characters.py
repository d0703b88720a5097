import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore.characters import (CoefficientCast, builtin_cast, conductor_of, enumerate_characters,
                                  gauss_sum, is_character, is_principal, load_cast, parity,
                                  primitive_of, save_cast)


def _phi(k):
    return sum(1 for m in range(1, k + 1) if math.gcd(m, k) == 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 100))
def test_row_orthogonality(k):
    rows = np.array([r.array(k) for r in enumerate_characters(k).rows])
    assert rows.shape[0] == _phi(k)
    G = rows @ rows.conj().T
    assert np.allclose(G, _phi(k) * np.eye(rows.shape[0]), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60))
def test_column_orthogonality(k):
    rows = np.array([r.array(k) for r in enumerate_characters(k).rows])
    G = rows.conj().T @ rows
    n = np.arange(1, k + 1)
    units = np.array([math.gcd(int(v), k) == 1 for v in n])
    expected = np.zeros((k, k))
    idx = np.flatnonzero(units)
    expected[idx, idx] = _phi(k)
    assert np.allclose(G, expected, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40))
def test_every_row_is_a_character(k):
    for r in enumerate_characters(k).rows:
        ok, why = is_character(r)
        assert ok, why


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 60))
def test_primitive_gauss_sum_modulus(k):
    for r in enumerate_characters(k).rows:
        if conductor_of(r) == k:
            assert abs(abs(gauss_sum(r)) - math.sqrt(k)) < 1e-9


def test_named_mod4():
    t = enumerate_characters(4)
    chi = t[(4, 2)]
    assert np.allclose(chi.array(4), [1, 0, -1, 0])
    assert parity(chi) == 1
    assert is_principal(t["principal"])


def test_not_a_character():
    ok, why = is_character(CoefficientCast(5, [0, 1, 0.28, -0.28, -1]))
    assert not ok and "multiplicativity" in why


def test_primitive_of_imprimitive():
    t = enumerate_characters(12)
    for r in t.rows:
        p = primitive_of(r)
        for n in range(1, 60):
            if math.gcd(n, 12) == 1:
                assert abs(p(n) - r(n)) < 1e-12


def test_cast_roundtrip(tmp_path):
    c = CoefficientCast(6, [0, 1, 0, 0, -1, 0.5j])
    save_cast(c, tmp_path / "c.txt")
    assert load_cast(tmp_path / "c.txt") == c


def test_cast_length_checked():
    with pytest.raises(ValueError):
        CoefficientCast(3, [1, 2])


def test_morse_thue_pattern():
    a = builtin_cast("morse_thue", 12)
    assert a.real.tolist() == [1, 0, -1, 0, -1, 0, 1, 0, -1, 0, 1, 0]


def test_random101_seeded():
    assert np.array_equal(builtin_cast("random101", 50, seed=4), builtin_cast("random101", 50, seed=4))
