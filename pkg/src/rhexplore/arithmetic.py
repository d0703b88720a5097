"""Integer arithmetic functions, sieves, Farey machinery and species counts."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError


def sieve_primes(N: int) -> list[int]:
    if N < 2:
        return []
    return prime_array(N).tolist()


def prime_array(N: int) -> np.ndarray:
    flags = np.ones(N + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(N) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags)


def smallest_factor_table(N: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n for 2 <= n <= N (spf[0]=spf[1]=0)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == 0:
            blk = spf[p * p::p]
            blk[blk == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, ascending primes."""
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mult_fn(kind: str, n: int, k: int | None = None):
    if n < 1:
        raise DomainError("arithmetic functions need n >= 1")
    fac = factorize(n)
    if kind == "mobius":
        return 0 if any(e > 1 for _, e in fac) else (-1) ** len(fac)
    if kind == "liouville":
        return (-1) ** sum(e for _, e in fac)
    if kind == "big_omega":
        return sum(e for _, e in fac)
    if kind == "von_mangoldt":
        return math.log(fac[0][0]) if len(fac) == 1 else 0.0
    if kind == "totient":
        r = n
        for p, _ in fac:
            r = r // p * (p - 1)
        return r
    if kind == "sigma_k":
        return sigma(n, 1 if k is None else k)
    raise ValueError(f"unknown arithmetic function {kind!r}")


def sigma(n: int, k: int) -> int:
    r = 1
    for p, e in factorize(n):
        r *= sum(p ** (k * i) for i in range(e + 1))
    return r


def mobius_array(N: int) -> np.ndarray:
    """mu(n) for 0 <= n <= N (index 0 unused)."""
    spf = smallest_factor_table(N)
    mu = np.zeros(N + 1, dtype=np.int8)
    if N >= 1:
        mu[1] = 1
    for n in range(2, N + 1):
        p = spf[n]
        m = n // p
        mu[n] = 0 if m % p == 0 else -mu[m]
    return mu


def liouville_array(N: int) -> np.ndarray:
    spf = smallest_factor_table(N)
    lam = np.zeros(N + 1, dtype=np.int8)
    if N >= 1:
        lam[1] = 1
    for n in range(2, N + 1):
        lam[n] = -lam[n // spf[n]]
    return lam


def mobius_array_fast(N: int) -> np.ndarray:
    """Vectorized Mobius sieve (used for large N)."""
    mu = np.ones(N + 1, dtype=np.int8)
    mu[0] = 0
    for p in prime_array(N):
        mu[p::p] *= -1
        if p * p <= N:
            mu[p * p::p * p] = 0
    return mu


def von_mangoldt_array(N: int) -> np.ndarray:
    lam = np.zeros(N + 1)
    for p in prime_array(N):
        q = p
        lp = math.log(p)
        while q <= N:
            lam[q] = lp
            q *= p
    return lam


def unordered_factorizations(n: int, signed: bool = False) -> int:
    """Multiplicative partitions of n; the signed count weights each by (-1)^parts."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return _phi(n, n, -1 if signed else 1)


@lru_cache(maxsize=None)
def _phi(m: int, n: int, sgn: int) -> int:
    # factorizations of n into parts each <= m
    if n == 1:
        return 1
    return sum(sgn * _phi(d, n // d, sgn) for d in divisors(n) if 2 <= d <= m)


def ramanujan_tau(n: int) -> int:
    """tau(n) from the sigma_3 / sigma_5 convolution, in exact integers."""
    if n < 1:
        raise DomainError("n must be >= 1")
    s3 = [0] + [sigma(k, 3) for k in range(1, n + 1)]
    s5 = [0] + [sigma(k, 5) for k in range(1, n + 1)]
    conv = sum((6 * k - 4 * (n - k)) * s3[k] * s5[n - k] for k in range(1, n))
    num = (5 * s3[n] + 7 * s5[n]) * n - 12 * 35 * conv
    q, r = divmod(num, 12)
    if r:
        raise ArithmeticError("tau convolution did not produce an integer")
    return q


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n with B_1 = -1/2, by the standard recurrence."""
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        B[m] = -sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1)
    return B


def farey(n: int) -> list[Fraction]:
    if n < 1:
        raise DomainError("Farey order must be >= 1")
    a, b, c, d = 0, 1, 1, n
    out = [Fraction(0, 1)]
    while c <= n:
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Fraction(a, b))
    return out


def mediant(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a.numerator + b.numerator, a.denominator + b.denominator)


def continued_fraction(x: Fraction) -> list[int]:
    """Canonical terms [a1, a2, ...] of x in (0,1); last term >= 2."""
    x = Fraction(x)
    if not 0 < x < 1:
        raise DomainError("continued_fraction expects 0 < x < 1")
    terms = []
    while x:
        x = 1 / x
        a = math.floor(x)
        terms.append(a)
        x -= a
    return terms


def cf_value(terms: list[int]) -> Fraction:
    v = Fraction(0)
    for a in reversed(terms):
        v = 1 / (a + v)
    return v


def farey_children(terms: list[int]) -> tuple[Fraction, Fraction]:
    """Children from the two equivalent forms [..., a] and [..., a-1, 1]."""
    canon = list(terms)
    dual = canon[:-1] + [canon[-1] - 1, 1]
    first = cf_value(canon[:-1] + [canon[-1] + 1])
    second = cf_value(dual[:-1] + [dual[-1] + 1])
    return first, second


def sqrt_minus_one_count(q: int) -> int:
    if q == 9:
        # elements a + b*alpha of F_3[alpha]/(alpha^2 + 1)
        count = 0
        for a in range(3):
            for b in range(3):
                # (a + b alpha)^2 = a^2 - b^2 + 2ab alpha
                if (a * a - b * b) % 3 == 2 and (2 * a * b) % 3 == 0:
                    count += 1
        return count
    if q < 2 or len(factorize(q)) != 1 or factorize(q)[0][1] != 1:
        raise DomainError("sqrt_minus_one_count supports primes and 9")
    return sum(1 for r in range(q) if (r * r + 1) % q == 0)


def field_product_species(n: int) -> Fraction:
    """Weighted count of products of finite fields of total order n, over n!."""
    if n < 1:
        raise DomainError("n must be >= 1")
    total = Fraction(0)
    for combo in _prime_power_multisets(n):
        weight = Fraction(1)
        for _, m in combo:
            weight /= m
        for key in set(combo):
            weight /= math.factorial(combo.count(key))
        total += weight
    return total


def _prime_power_multisets(n):
    # multisets of (p, m) with prod p^m = n, as sorted tuples
    fac = factorize(n) if n > 1 else []
    per_prime = []
    for p, e in fac:
        per_prime.append([tuple((p, m) for m in part) for part in _partitions(e)])
    combos = [()]
    for choices in per_prime:
        combos = [c + ch for c in combos for ch in choices]
    return combos


def _partitions(e, largest=None):
    largest = e if largest is None else largest
    if e == 0:
        return [()]
    out = []
    for first in range(min(e, largest), 0, -1):
        for rest in _partitions(e - first, first):
            out.append((first,) + rest)
    return out


def r2_quarter(N: int) -> np.ndarray:
    """r2(n)/4 for 0 <= n <= N, counting lattice points on circles."""
    counts = np.zeros(N + 1, dtype=np.int64)
    R = math.isqrt(N)
    m = np.arange(-R, R + 1)
    sq = (m[:, None] ** 2 + m[None, :] ** 2).ravel()
    sq = sq[(sq <= N) & (sq > 0)]
    np.add.at(counts, sq, 1)
    return counts // 4
