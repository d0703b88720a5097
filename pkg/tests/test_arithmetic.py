import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhexplore.errors import DomainError
from rhexplore.arithmetic import (bernoulli_numbers, continued_fraction, cf_value, divisors, factorize,
                                  farey, liouville_array, mediant, mobius_array, mobius_array_fast,
                                  mult_fn, prime_array, ramanujan_tau, sigma, smallest_factor_table,
                                  von_mangoldt_array)


def test_prime_array_small():
    assert prime_array(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10 ** 6))
def test_factorize_roundtrip(n):
    prod = 1
    for p, e in factorize(n):
        assert len(factorize(p)) == 1
        prod *= p ** e
    assert prod == n


def test_sieves_agree():
    N = 5000
    assert np.array_equal(mobius_array(N), mobius_array_fast(N))
    spf = smallest_factor_table(N)
    for n in range(2, 200):
        assert spf[n] == factorize(n)[0][0]


def test_mobius_sum_over_divisors():
    mu = mobius_array_fast(500)
    for n in range(1, 501):
        assert sum(mu[d] for d in divisors(n)) == (1 if n == 1 else 0)


def test_von_mangoldt_sum_is_log():
    lam = von_mangoldt_array(300)
    for n in range(1, 301):
        assert abs(sum(lam[d] for d in divisors(n)) - math.log(n)) < 1e-9


def test_liouville_values():
    lam = liouville_array(12)
    assert lam[1:].tolist() == [1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1]


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 2000), st.integers(0, 3))
def test_sigma_multiplicative(n, k):
    assert sigma(n, k) == sum(d ** k for d in divisors(n))


def test_tau_values():
    assert [ramanujan_tau(n) for n in range(1, 11)] == [1, -24, 252, -1472, 4830, -6048, -16744,
                                                        84480, -113643, -115920]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30))
def test_tau_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert ramanujan_tau(m * n) == ramanujan_tau(m) * ramanujan_tau(n)


def test_bernoulli():
    B = bernoulli_numbers(12)
    assert B[2] == Fraction(1, 6) and B[12] == Fraction(-691, 2730)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 60))
def test_farey_neighbours(n):
    F = farey(n)
    for a, b in zip(F, F[1:]):
        assert b.numerator * a.denominator - a.numerator * b.denominator == 1
        assert a < mediant(a, b) < b


def test_farey_length_recurrence():
    prev = len(farey(1))
    for n in range(2, 80):
        phi = sum(1 for m in range(1, n + 1) if math.gcd(m, n) == 1)
        cur = len(farey(n))
        assert cur == prev + phi
        prev = cur


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10 ** 6))
def test_continued_fraction_roundtrip(x):
    if 0 < x < 1:
        terms = continued_fraction(x)
        assert cf_value(terms) == x
        assert len(terms) == 1 or terms[-1] >= 2


def test_continued_fraction_domain():
    with pytest.raises(DomainError):
        continued_fraction(Fraction(3, 2))


def test_mult_fn_kinds():
    assert mult_fn("mobius", 30) == -1
    assert mult_fn("mobius", 12) == 0
