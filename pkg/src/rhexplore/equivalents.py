"""Prime-side equivalents: psi and the explicit formula, summatory bounds, Farey, pi - li."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expi

from .arithmetic import mobius_array_fast, prime_array, smallest_factor_table, von_mangoldt_array
from .errors import DomainError

LOG_2PI = math.log(2 * math.pi)


def psi_step(x: float) -> float:
    """Chebyshev psi(x) = sum_{n <= x} Lambda(n)."""
    if x < 1:
        return 0.0
    return float(von_mangoldt_array(int(math.floor(x))).sum())


def psi_table(N: int) -> np.ndarray:
    """psi(n) for n = 0..N."""
    return np.cumsum(von_mangoldt_array(N))


def li(x):
    """Principal-value integral of 1/ln t from 0 to x, i.e. Ei(ln x)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("li needs x >= 0")
    with np.errstate(divide="ignore"):
        out = np.where(x == 0, 0.0, expi(np.log(np.where(x == 0, 1.0, x))))
    return float(out) if out.ndim == 0 else out


def _ordered(zeros, K):
    rho = np.array([complex(getattr(z, "location", z)) for z in zeros], dtype=complex)
    rho = rho[np.argsort(np.abs(rho.imag), kind="stable")]
    return rho if K is None else rho[:K]


def explicit_formula(x, zeros, K: int | None = None, mode: str = "psi", pairs: bool = True):
    """Truncated explicit formula.

    psi:     x - sum 2 Re(x^rho / rho) - log(1 - x^-2)/2 - log(2 pi) over K zeros of
             positive ordinate (conjugates paired).
    generic: sum x^rho / rho over the supplied zeros; with pairs=True each zero also
             stands for its conjugate (real coefficients).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 1):
        raise DomainError("explicit formula needs x > 1")
    rho = _ordered(zeros, K)
    lx = np.log(xs)
    terms = np.exp(np.outer(lx, rho)) / rho if rho.size else np.zeros((xs.size, 0))
    if mode == "psi":
        rho_up = rho[rho.imag > 0]
        t = np.exp(np.outer(lx, rho_up)) / rho_up if rho_up.size else np.zeros((xs.size, 0))
        val = xs - 2 * np.real(t.sum(axis=1)) - 0.5 * np.log1p(-xs ** -2.0) - LOG_2PI
    elif mode == "generic":
        s = terms.sum(axis=1)
        val = 2 * np.real(s) if pairs else s
    else:
        raise DomainError(f"unknown explicit-formula mode {mode!r}")
    return val if np.ndim(x) else val[0]


@dataclass
class ShiftReport:
    points: np.ndarray
    jumps: np.ndarray
    thresholds: np.ndarray
    shifted: np.ndarray


def step_shifts(zeros, points, K: int | None = None, pairs: bool = True) -> ShiftReport:
    """Jump of the generic counter between m - 1/2 and m + 1/2 against 0.5 log(spf(m))."""
    m = np.asarray(points, dtype=int)
    lo = explicit_formula(m - 0.5, zeros, K, "generic", pairs)
    hi = explicit_formula(m + 0.5, zeros, K, "generic", pairs)
    jump = hi - lo
    spf = smallest_factor_table(int(m.max()))
    thr = 0.5 * np.log(spf[m].astype(float))
    return ShiftReport(m, jump, thr, np.abs(jump) > thr)


@dataclass
class SummatoryReport:
    kind: str
    x_grid: np.ndarray
    values: np.ndarray
    bound_values: np.ndarray
    violations: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value", "bound", "holds"])
            for x, v, b in zip(self.x_grid, self.values, self.bound_values):
                w.writerow([int(x), int(v), repr(float(b)), int(abs(v) <= b)])


def liouville_array_fast(N: int) -> np.ndarray:
    omega = np.zeros(N + 1, dtype=np.int8)
    for p in prime_array(N):
        q = int(p)
        while q <= N:
            omega[q::q] += 1
            q *= int(p)
    lam = np.where(omega % 2 == 0, 1, -1).astype(np.int8)
    lam[0] = 0
    return lam


def summatory_check(kind: str, X: int, grid_points: int = 200) -> SummatoryReport:
    """Running sums of mu or lambda against sqrt(x); violations checked at every x <= X."""
    if X < 10:
        raise DomainError("X must be >= 10")
    if kind == "mertens":
        a = mobius_array_fast(X)
    elif kind == "liouville":
        a = liouville_array_fast(X)
    else:
        raise DomainError(f"unknown summatory kind {kind!r}")
    S = np.cumsum(a.astype(np.int64))
    n = np.arange(X + 1)
    bound = np.sqrt(n)
    bad = np.flatnonzero(np.abs(S[1:]) > bound[1:]) + 1
    grid = np.unique(np.round(np.logspace(0, math.log10(X), grid_points)).astype(int))
    return SummatoryReport(kind, grid, S[grid], bound[grid], [int(v) for v in bad])


def mertens(x: int) -> int:
    return int(mobius_array_fast(int(x)).astype(np.int64).sum())


def farey_array(n: int) -> np.ndarray:
    """Farey fractions of order n in (0, 1] as floats, ascending."""
    if n < 1:
        raise DomainError("Farey order must be >= 1")
    a, b, c, d = 0, 1, 1, n
    out = []
    while c <= n:
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(a / b)
    return np.array(out)


def farey_discrepancy(n: int) -> tuple[float, float]:
    """sum |d_k| and sum d_k^2 with d_k = a_k - k/m_n, fractions in (0, 1] indexed from 1."""
    a = farey_array(n)
    m = a.size
    d = a - np.arange(1, m + 1) / m
    return float(np.abs(d).sum()), float((d * d).sum())


def prime_pi(x: int) -> int:
    return int(prime_array(int(x)).size)


def pi_li_gap(x: float):
    """(|pi(x) - li(x)|, sqrt(x) log(x) / 8 pi, holds); holds is None below 2657."""
    if x < 2:
        raise DomainError("x must be >= 2")
    gap = abs(prime_pi(int(x)) - li(x))
    bound = math.sqrt(x) * math.log(x) / (8 * math.pi)
    holds = None if x < 2657 else bool(gap < bound)
    return gap, bound, holds
