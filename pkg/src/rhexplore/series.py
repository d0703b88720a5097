"""Dirichlet-series evaluation: sources, partial sums, eta and Euler products."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels
from .arithmetic import prime_array, smallest_factor_table
from .characters import CoefficientCast
from .errors import ParseError, PoleError

LN2 = math.log(2.0)


def default_terms(z) -> int:
    """Truncation heuristic for strip evaluation of rotating casts."""
    return max(2000, math.ceil(20 * float(np.max(np.abs(np.imag(z))))))


_log_cache = np.zeros(0)


def log_n(N: int) -> np.ndarray:
    """ln(1..N), cached."""
    global _log_cache
    if _log_cache.size < N:
        _log_cache = np.log(np.arange(1, max(N, 2 * _log_cache.size) + 1, dtype=float))
    return _log_cache[:N]


class CoefficientSource:
    """Deterministic a_1, a_2, ... produced in blocks."""

    def __init__(self):
        self._cache = np.zeros(0, dtype=complex)

    def _compute(self, N: int) -> np.ndarray:
        raise NotImplementedError

    def coeffs(self, N: int) -> np.ndarray:
        if self._cache.size < N:
            self._cache = np.asarray(self._compute(max(N, 2 * self._cache.size)), dtype=complex)
        return self._cache[:N]

    def __getitem__(self, n: int) -> complex:
        return complex(self.coeffs(n)[n - 1])

    @property
    def max_terms(self):
        return None


class PeriodicSource(CoefficientSource):
    def __init__(self, cast: CoefficientCast):
        super().__init__()
        self.cast = cast

    def _compute(self, N):
        return self.cast.array(N)


class ListSource(CoefficientSource):
    """Explicit finite list; terms beyond the list are treated as unavailable."""

    def __init__(self, values):
        super().__init__()
        self.values = np.asarray(values, dtype=complex)
        if self.values.size == 0:
            raise ValueError("empty coefficient list")

    def coeffs(self, N):
        if N > self.values.size:
            raise ValueError(f"requested {N} coefficients, only {self.values.size} available")
        return self.values[:N]

    @property
    def max_terms(self):
        return self.values.size


class FileSource(ListSource):
    def __init__(self, path):
        self.path = Path(path)
        super().__init__(load_coefficients(path))


class FunctionSource(CoefficientSource):
    """a_n = fn(n) with fn vectorized over integer arrays."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray]):
        super().__init__()
        self.fn = fn

    def _compute(self, N):
        return np.asarray(self.fn(np.arange(1, N + 1)), dtype=complex)


class MultiplicativeSource(CoefficientSource):
    """Completely multiplicative extension of a prime assignment p -> chi(p)."""

    def __init__(self, prime_coeffs):
        super().__init__()
        self.prime_coeffs = prime_coeffs

    def _prime_value(self, p):
        pc = self.prime_coeffs
        return complex(pc[p] if isinstance(pc, dict) else pc(p))

    def _compute(self, N):
        spf = smallest_factor_table(N)
        out = np.zeros(N + 1, dtype=complex)
        out[1] = 1.0
        pvals = {int(p): self._prime_value(int(p)) for p in prime_array(N)}
        for n in range(2, N + 1):
            p = int(spf[n])
            out[n] = pvals[p] * out[n // p]
        return out[1:]


class EulerFactorSource(CoefficientSource):
    """Multiplicative coefficients from local factors.

    local(p) returns (e_1, ..., e_d) with Euler factor
    (1 - e_1 x + e_2 x^2 - ... )^{-1}, x = p^{-z}.
    """

    def __init__(self, local: Callable[[int], tuple]):
        super().__init__()
        self.local = local

    def _compute(self, N):
        spf = smallest_factor_table(N)
        out = np.zeros(N + 1, dtype=complex)
        out[1] = 1.0
        for p in prime_array(N):
            p = int(p)
            e = [complex(v) for v in self.local(p)]
            pw = [1.0 + 0j]
            q = p
            while q <= N:
                k = len(pw)
                val = sum((-1) ** (i + 1) * e[i - 1] * pw[k - i] for i in range(1, min(k, len(e)) + 1))
                pw.append(val)
                out[q] = val
                q *= p
        for n in range(2, N + 1):
            p = int(spf[n])
            m = n
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            if m > 1:
                out[n] = out[q] * out[m]
        return out[1:]


class EtaSource(CoefficientSource):
    """b_n = a_n - 2 a_{n/2} (n even); evaluation multiplies by (1 - 2^{1-z})^{-1}."""

    def __init__(self, base: CoefficientSource):
        super().__init__()
        self.base = base

    def _compute(self, N):
        a = self.base.coeffs(N).copy()
        a[1::2] -= 2.0 * self.base.coeffs(N // 2)
        return a

    @staticmethod
    def prefactor(z):
        z = np.asarray(z, dtype=complex)
        d = 1.0 - np.exp((1.0 - z) * LN2)
        if np.any(np.abs(d) < 1e-12):
            raise PoleError("eta prefactor pole at z = 1 + 2 pi i k / ln 2")
        return 1.0 / d


def eta_transform(src: CoefficientSource) -> EtaSource:
    return EtaSource(src)


def multiplicative_extend(prime_coeffs) -> MultiplicativeSource:
    return MultiplicativeSource(prime_coeffs)


@dataclass
class PartialSumTrail:
    z: complex
    sums: np.ndarray
    term_phases: np.ndarray


def eval_partial(src: CoefficientSource, z, N: int, want_trail: bool = False):
    """S_N = sum_{n<=N} a_n n^{-z}; z may be an array."""
    if N < 1:
        raise ValueError("N must be >= 1")
    a = src.coeffs(N)
    if want_trail:
        zs = complex(z)
        terms = a * np.exp(-zs * log_n(N))
        sums = np.cumsum(terms)
        return complex(sums[-1]), PartialSumTrail(zs, sums, np.angle(terms))
    vals = kernels.dirichlet_points(a, log_n(N), np.atleast_1d(z))
    return vals if np.ndim(z) else complex(vals[0])


def eval_partial_line(src: CoefficientSource, x, y0, dy, ny, N):
    return kernels.dirichlet_line(src.coeffs(N), log_n(N), x, y0, dy, ny)


class SeriesFunction:
    """Naked partial sums as an evaluable; truncation follows the height band."""

    def __init__(self, src: CoefficientSource, terms: Callable[[float], int] | None = None,
                 band: float = 50.0):
        self.src = src
        self.terms = terms or (lambda t: default_terms(1j * t))
        self.band = band

    def terms_used(self, z) -> int:
        n = self._n_for(abs(complex(z).imag))
        return n

    def _n_for(self, tmax):
        top = (math.floor(tmax / self.band) + 1) * self.band
        n = int(self.terms(top))
        if self.src.max_terms is not None:
            n = min(n, self.src.max_terms)
        return n

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        out = np.empty_like(s)
        key = np.floor(np.abs(s.imag) / self.band)
        for k in np.unique(key):
            m = key == k
            out[m] = eval_partial(self.src, s[m], self._n_for(k * self.band))
        return complex(out[0]) if scalar else out.reshape(np.shape(z))

    def on_line(self, x, y0, dy, ny):
        ys = y0 + dy * np.arange(ny)
        out = np.empty(ny, dtype=complex)
        key = np.floor(np.abs(ys) / self.band)
        start = 0
        while start < ny:
            stop = start
            while stop < ny and key[stop] == key[start]:
                stop += 1
            N = self._n_for(key[start] * self.band)
            out[start:stop] = eval_partial_line(self.src, x, ys[start], dy, stop - start, N)
            start = stop
        return out


def euler_partial_product(prime_coeffs, z, P: int) -> complex:
    """prod_{p<=P} (1 - chi(p) p^{-z})^{-1}."""
    if P < 2:
        raise ValueError("P must be >= 2")
    ps = prime_array(P)
    if isinstance(prime_coeffs, dict):
        chi = np.array([prime_coeffs.get(int(p), 0) for p in ps], dtype=complex)
    elif callable(prime_coeffs):
        chi = np.array([prime_coeffs(int(p)) for p in ps], dtype=complex)
    else:
        chi = np.full(ps.size, complex(prime_coeffs))
    f = 1.0 - chi * np.exp(-complex(z) * np.log(ps))
    if np.any(np.abs(f) < 1e-15):
        raise PoleError("Euler factor vanishes")
    # product in log form keeps the magnitude in range; the phase is tracked exactly
    return complex(np.exp(-np.sum(np.log(f))))


def phase_lock_indices(y: float, count: int) -> np.ndarray:
    if y <= 0:
        raise ValueError("y must be positive")
    k = np.arange(1, count + 1)
    return 1.0 / np.expm1(k * math.pi / y)


def convergence_steps(src: CoefficientSource, z, eps: float = 0.005, run: int = 5,
                      N_max: int = 100000, prefactor: bool = False) -> int:
    """Smallest N with |S_n| < eps for `run` consecutive n ending at N (else N_max)."""
    _, trail = eval_partial(src, z, N_max, want_trail=True)
    sums = trail.sums
    if prefactor:
        sums = sums * complex(EtaSource.prefactor(z))
    small = np.abs(sums) < eps
    streak = 0
    for i, ok in enumerate(small):
        streak = streak + 1 if ok else 0
        if streak >= run:
            return i + 1
    return N_max


def coefficient_walk(src: CoefficientSource, N: int) -> np.ndarray:
    return np.cumsum(src.coeffs(N))


def save_coefficients(values, path) -> None:
    values = np.asarray(values, dtype=complex)
    lines = [f"count={values.size}"] + [f"{float(v.real)!r} {float(v.imag)!r}" for v in values]
    Path(path).write_text("\n".join(lines) + "\n")


def load_coefficients(path) -> np.ndarray:
    count = None
    vals = []
    for i, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("count="):
            try:
                count = int(line.split("=", 1)[1])
            except ValueError as exc:
                raise ParseError("bad count", i) from exc
            continue
        vals.append(_parse_pair(line, i))
    if not vals:
        raise ParseError("no coefficients", None)
    if count is not None and count != len(vals):
        raise ParseError(f"count={count} but {len(vals)} values")
    return np.asarray(vals, dtype=complex)


def _parse_pair(line, lineno):
    parts = line.replace(",", " ").split()
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ParseError(f"non-numeric value {line!r}", lineno) from exc
    raise ParseError(f"expected 're im', got {line!r}", lineno)
