"""Elliptic curves over Q: point counts mod p, reduction types, L-series."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arithmetic import factorize, prime_array, smallest_factor_table
from .errors import DomainError, ParseError
from .lfunctions import LFunctionSpec, cusp_spec, measure_sign
from .series import ListSource


class ReductionType(enum.Enum):
    good = "good"
    mult_split = "mult_split"
    mult_nonsplit = "mult_nonsplit"
    additive = "additive"


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise DomainError("singular Weierstrass model (discriminant 0)")

    @classmethod
    def from_list(cls, coeffs):
        return cls(*(int(c) for c in coeffs))

    @property
    def b2(self):
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def __str__(self):
        return f"[{self.a1},{self.a2},{self.a3},{self.a4},{self.a6}]"


@dataclass(frozen=True)
class ReductionData:
    p: int
    A_p: int
    a_p: int
    rtype: ReductionType
    approximate: bool = False


def count_points(curve: WeierstrassCurve, p: int) -> int:
    """Projective points over F_p, including the singular point if any."""
    if p < 5:
        return 1 + _affine_bruteforce(curve, p)
    x = np.arange(p, dtype=np.int64)
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6 = curve.b2 % p, curve.b4 % p, curve.b6 % p
    rhs = (((4 * x + b2) % p * x % p + 2 * b4) % p * x + b6) % p
    chi = _quadratic_character_table(p)
    return int(p + 1 + chi[rhs].sum())


_chi_cache: dict = {}


def _quadratic_character_table(p):
    tab = _chi_cache.get(p)
    if tab is None:
        tab = -np.ones(p, dtype=np.int64)
        tab[0] = 0
        sq = (np.arange(1, p, dtype=np.int64) ** 2) % p
        tab[sq] = 1
        if len(_chi_cache) < 4096:
            _chi_cache[p] = tab
    return tab


def _affine_bruteforce(curve, p):
    a1, a2, a3, a4, a6 = (c % p for c in (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6))
    n = 0
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % p == 0:
                n += 1
    return n


def _singular_point(curve, p):
    if p > 3:
        # double root of the completed cubic 4x^3 + b2 x^2 + 2 b4 x + b6
        x = np.arange(p, dtype=np.int64)
        b2, b4, b6 = curve.b2 % p, curve.b4 % p, curve.b6 % p
        g = (((4 * x + b2) % p * x % p + 2 * b4) % p * x + b6) % p
        dg = ((12 * x % p * x) % p + 2 * b2 * x + 2 * b4) % p
        hits = np.flatnonzero((g == 0) & (dg == 0))
        if hits.size:
            x0 = int(hits[0])
            y0 = (-(curve.a1 * x0 + curve.a3) * pow(2, -1, p)) % p
            return x0, y0
        raise ArithmeticError(f"no singular point found mod {p}")
    a1, a2, a3, a4, a6 = (c % p for c in (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6))
    for x in range(p):
        for y in range(p):
            f = (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % p
            fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % p
            fy = (2 * y + a1 * x + a3) % p
            if f == 0 and fx == 0 and fy == 0:
                return x, y
    raise ArithmeticError(f"no singular point found mod {p}")


def local_data(curve: WeierstrassCurve, p: int) -> ReductionData:
    if p < 2 or len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
        raise DomainError(f"{p} is not prime")
    A = count_points(curve, p)
    ap = p + 1 - A
    if curve.discriminant % p:
        return ReductionData(p, A, ap, ReductionType.good)
    x0, _ = _singular_point(curve, p)
    # tangent cone at the singular point: m^2 + a1 m - (a2 + 3 x0) = 0
    a1 = curve.a1 % p
    c = (-(curve.a2 + 3 * x0)) % p
    roots = [m for m in range(p) if (m * m + a1 * m + c) % p == 0]
    if p == 2:
        separable = a1 % 2 == 1
    else:
        separable = (a1 * a1 - 4 * c) % p != 0
    if not separable:
        return ReductionData(p, A, 0, ReductionType.additive, approximate=p in (2, 3))
    rtype = ReductionType.mult_split if len(roots) == 2 else ReductionType.mult_nonsplit
    return ReductionData(p, A, ap, rtype)


def conductor(curve: WeierstrassCurve, supplied: int | None = None) -> int:
    """Tame conductor: exponent 1 for multiplicative, 2 for additive at p >= 5."""
    if supplied is not None:
        return int(supplied)
    N = 1
    for p, _ in factorize(abs(curve.discriminant)):
        rd = local_data(curve, p)
        if rd.rtype is ReductionType.additive:
            if p in (2, 3):
                raise DomainError(f"additive reduction at {p}: supply the conductor")
            if curve.c4 % p ** 4 == 0 and curve.c6 % p ** 6 == 0 and curve.discriminant % p ** 12 == 0:
                raise DomainError(f"model is not minimal at {p}")
            N *= p * p
        elif rd.rtype is not ReductionType.good:
            N *= p
    return N


def prime_coefficients(curve: WeierstrassCurve, P: int) -> dict:
    return {int(p): local_data(curve, int(p)).a_p for p in prime_array(P)}


def dirichlet_coeffs(curve_or_map, N_terms: int, cond: int | None = None) -> np.ndarray:
    """c_1..c_N from a_p by c_{p^e} = c_p c_{p^{e-1}} - [p not | N] p c_{p^{e-2}}."""
    if isinstance(curve_or_map, WeierstrassCurve):
        cond = conductor(curve_or_map, cond)
        ap = _fast_ap(curve_or_map, N_terms, cond)
    else:
        ap = curve_or_map
        if cond is None:
            raise ValueError("conductor required with a prime map")
    spf = smallest_factor_table(N_terms)
    c = np.zeros(N_terms + 1, dtype=float if _all_real(ap) else complex)
    c[1] = 1
    for p in prime_array(N_terms):
        p = int(p)
        bad = cond % p == 0
        prev2, prev = 1, ap[p]
        c[p] = prev
        q = p * p
        while q <= N_terms:
            cur = ap[p] * prev - (0 if bad else p) * prev2
            c[q] = cur
            prev2, prev = prev, cur
            q *= p
    for n in range(2, N_terms + 1):
        p = int(spf[n])
        m, q = n, 1
        while m % p == 0:
            m //= p
            q *= p
        if m > 1:
            c[n] = c[q] * c[m]
    return c[1:]


def _all_real(ap):
    return all(isinstance(v, (int, np.integer)) or (not isinstance(v, complex)) for v in ap.values())


def _fast_ap(curve, P, cond):
    out = {}
    for p in prime_array(P):
        p = int(p)
        if cond % p == 0:
            out[p] = local_data(curve, p).a_p
        else:
            out[p] = p + 1 - count_points(curve, p)
    return out


class _CurveSource(ListSource):
    """Coefficients generated on demand (grows by doubling)."""

    def __init__(self, prime_map_fn, cond):
        self.prime_map_fn = prime_map_fn
        self.cond = cond
        self._n = 0
        self.values = np.zeros(0)

    def coeffs(self, N):
        if N > self.values.size:
            n = max(N, 2 * self.values.size, 64)
            self.values = np.asarray(dirichlet_coeffs(self.prime_map_fn(n), n, self.cond), dtype=complex)
        return self.values[:N]

    @property
    def max_terms(self):
        return None


def build_lfunction(curve: WeierstrassCurve, N_terms: int = 1000, cond: int | None = None,
                    sign: float | None = None) -> LFunctionSpec:
    """Weight-2 spec with conductor from local data and a measured sign."""
    N = conductor(curve, cond)
    src = _CurveSource(lambda n: _fast_ap(curve, n, N), N)
    src.coeffs(N_terms)
    spec = cusp_spec(src, N, 2.0, 1.0, label=f"E{curve}")
    if sign is None:
        sign, _ = measure_sign(spec)
    return LFunctionSpec(src, N, 2.0, (0.0, 1.0), complex(sign), label=f"E{curve}",
                         evaluator=spec.evaluator)


def interp_prime_map(map_a: dict, map_b: dict, t: float) -> dict:
    return {p: t * map_a[p] + (1 - t) * map_b[p] for p in map_a}


def interp_curves(curve_a: WeierstrassCurve, curve_b: WeierstrassCurve, t: float, N_terms: int,
                  cond: int | None = None) -> np.ndarray:
    """Coefficients from c_p = t a_p + (1 - t) b_p, then the shared recurrence."""
    cond = cond or conductor(curve_a)
    ma = _fast_ap(curve_a, N_terms, cond)
    mb = _fast_ap(curve_b, N_terms, cond)
    return dirichlet_coeffs(interp_prime_map(ma, mb, t), N_terms, cond)


def load_curves(path) -> list[tuple[WeierstrassCurve, int | None]]:
    out = []
    for i, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        out.append(parse_curve(line, i))
    return out


def parse_curve(text: str, lineno=None) -> tuple[WeierstrassCurve, int | None]:
    parts = text.replace(",", " ").replace("[", " ").replace("]", " ").split()
    if len(parts) not in (5, 6):
        raise ParseError("expected 'a1 a2 a3 a4 a6 [conductor]'", lineno)
    try:
        vals = [int(v) for v in parts]
    except ValueError as exc:
        raise ParseError(f"non-integer curve data {text!r}", lineno) from exc
    return WeierstrassCurve(*vals[:5]), (vals[5] if len(vals) == 6 else None)
