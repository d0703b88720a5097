"""Evaluable L-functions with functional equations.

Conventions
-----------
A spec with conductor N, weight w, gamma shifts (l_1..l_d) and sign eps
has completed function

    Lambda(z) = N^{z/2} prod_i Gamma_R(z + l_i) L(z),  Gamma_R(s) = pi^{-s/2} Gamma(s/2),

and satisfies Lambda(z) = eps * conj-Lambda(w - z).  Cusp forms of weight k
use shifts (0, 1) and w = k, which reproduces N^{z/2} (2 pi)^{-z} Gamma(z)
up to a constant.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels
from .arithmetic import bernoulli_numbers, factorize, r2_quarter
from .characters import (CoefficientCast, cast_from, enumerate_characters, gauss_sum,
                         is_principal, parity, primitive_of)
from .errors import DomainError, ParseError, PoleError
from .numkernel import QuadratureConfig, adaptive_quad, cloggamma, theta0
from .series import (CoefficientSource, FunctionSource, ListSource, PeriodicSource,
                     default_terms, eval_partial, log_n)

LN2 = math.log(2.0)
LOG_PI = math.log(math.pi)
PHI = (1 + math.sqrt(5.0)) / 2
XI_DH = -PHI + math.sqrt(1 + PHI * PHI)
ALPHA_DH7 = 0.80194


class EvaluationStrategy(enum.Enum):
    NakedSeries = "naked"
    EtaAccelerated = "eta"
    Reflect = "reflect"
    MellinTheta = "mellin"
    HurwitzEM = "hurwitz"


# ---------------------------------------------------------------------------
# Euler-Maclaurin engine for periodic coefficients (Hurwitz decomposition)

_EM_M = 16
_EM_RHO = 0.3
_B2J = [float(b) for b in bernoulli_numbers(2 * _EM_M)[2::2]]
_B2J_FACT = np.array([_B2J[j] / math.factorial(2 * j + 2) for j in range(_EM_M)])


def _em_cutoff(smax: float) -> float:
    return (smax + 2 * _EM_M + 1) / (2 * math.pi * _EM_RHO)


def _phi_expm1(u):
    small = np.abs(u) < 1e-4
    out = np.empty_like(u)
    us = u[small]
    out[small] = 1 + us / 2 + us * us / 6 + us ** 3 / 24
    ub = u[~small]
    out[~small] = np.expm1(ub) / ub
    return out


def _em_tail(s, w):
    """w^{-s}/2 + sum_j B_2j/(2j)! (s)_{2j-1} w^{-s-2j+1}, without the pole term."""
    lw = math.log(w)
    base = np.exp(-s * lw)
    total = 0.5 * base
    poch = s.copy()
    pw = base / w
    inv_w2 = 1.0 / (w * w)
    for j in range(_EM_M):
        total = total + _B2J_FACT[j] * poch * pw
        poch = poch * (s + 2 * j + 1) * (s + 2 * j + 2)
        pw = pw * inv_w2
    return total


class PeriodicDirichlet:
    """Accurate value of sum c(n) n^{-s} for a periodic cast, anywhere except a pole.

    L(s) = k^{-s} sum_a c(a) zeta(s, a/k), each Hurwitz zeta evaluated by a
    direct sum of n < N terms plus an Euler-Maclaurin tail.  The direct
    sums over all residues merge into one Dirichlet polynomial of length kN.
    """

    def __init__(self, cast: CoefficientCast):
        self.cast = cast
        self.k = cast.period
        self.res = [(a, cast(a)) for a in range(1, self.k + 1) if abs(cast(a)) > 0]
        self.csum = sum(c for _, c in self.res)
        self.has_pole = abs(self.csum) > 1e-12 * max(1.0, max(abs(c) for _, c in self.res))

    def _n_per_residue(self, smax):
        return max(4, math.ceil(_em_cutoff(smax)))

    def _tail(self, s, N):
        k = self.k
        lk = math.log(k)
        acc = np.zeros_like(s)
        pole = np.zeros_like(s)
        for a, c in self.res:
            w = N + a / k
            acc = acc + c * _em_tail(s, w)
            lw = math.log(w)
            if self.has_pole:
                pole = pole + c * np.exp((1 - s) * lw)
            else:
                pole = pole - c * lw * _phi_expm1((1 - s) * lw)
        if self.has_pole:
            d = s - 1
            if np.any(np.abs(d) < 1e-14):
                raise PoleError("pole at z = 1")
            pole = pole / d
        return np.exp(-s * lk) * (acc + pole)

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty_like(s)
        for idx, N in _bands(s, self._n_per_residue):
            ss = s[idx]
            M = N * self.k
            out[idx] = kernels.dirichlet_points(self.cast.array(M), log_n(M), ss) + self._tail(ss, N)
        return out

    def on_line(self, x, y0, dy, ny):
        out = np.empty(ny, dtype=complex)
        for k0, k1 in _line_bands(ny):
            ys = y0 + dy * np.arange(k0, k1)
            smax = abs(complex(x, max(abs(ys[0]), abs(ys[-1]))))
            N = self._n_per_residue(smax)
            M = N * self.k
            out[k0:k1] = kernels.dirichlet_line(self.cast.array(M), log_n(M), x, ys[0], dy, k1 - k0)
            out[k0:k1] += self._tail(x + 1j * ys, N)
        return out


def _bands(s, nfunc, step=16):
    """Group points so that each group shares one truncation (rounded up)."""
    need = np.array([nfunc(abs(v)) for v in s])
    need = (np.ceil(need / step) * step).astype(int)
    for N in np.unique(need):
        yield np.flatnonzero(need == N), int(N)


def _line_bands(ny, size=512):
    for k0 in range(0, ny, size):
        yield k0, min(ny, k0 + size)


def hurwitz_em(s, a: float):
    """zeta(s, a) for real a > 0 by direct sum plus Euler-Maclaurin tail."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty_like(s)
    for idx, N in _bands(s, lambda v: max(4, math.ceil(_em_cutoff(v) - a))):
        ss = s[idx]
        logs = np.log(np.arange(N) + a).astype(complex)
        head = kernels.dirichlet_points(np.ones(N, dtype=complex), logs, ss)
        w = N + a
        d = ss - 1
        if np.any(np.abs(d) < 1e-14):
            raise PoleError("Hurwitz zeta pole at z = 1")
        out[idx] = head + np.exp((1 - ss) * math.log(w)) / d + _em_tail(ss, w)
    return out


# ---------------------------------------------------------------------------
# Borwein-accelerated eta for zeta

@lru_cache(maxsize=64)
def _borwein_weights(n: int) -> np.ndarray:
    """Signed weights (-1)^k (d_n - d_k)/d_n for k = 0..n-1."""
    i = np.arange(n + 1)
    from scipy.special import gammaln  # vectorized log-gamma on reals
    lt = gammaln(n + i) + i * math.log(4.0) - gammaln(n - i + 1) - gammaln(2 * i + 1)
    lt[0] = gammaln(n) - gammaln(n + 1)
    t = np.exp(lt - lt.max())
    suffix = np.cumsum(t[::-1])[::-1]       # suffix[k] = sum_{i >= k} t_i
    w = suffix[1:] / suffix[0]
    sign = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return (sign * w).astype(complex)


def _borwein_terms(smag_t: float) -> int:
    t = smag_t
    return max(30, math.ceil((math.pi * t + math.log(3 * (1 + 2 * t)) + 37) / math.log(3 + math.sqrt(8))))


def eta_borwein(s):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty_like(s)
    tmax = np.abs(s.imag)
    for idx, n in _bands(tmax, _borwein_terms):
        out[idx] = kernels.dirichlet_points(_borwein_weights(n), log_n(n), s[idx])
    return out


def _eta_prefactor(s):
    return 1.0 - np.exp((1.0 - s) * LN2)


class ZetaFunction:
    """Riemann zeta as an evaluable: vectorized calls plus a fast line path."""

    def __call__(self, z):
        return zeta(z)

    def on_line(self, x, y0, dy, ny):
        if abs(x - 1.0) < 1e-3 or (x <= 0 and abs(x) < 1e-3):
            return zeta(x + 1j * (y0 + dy * np.arange(ny)))
        if x < 0:
            # reflection: the mirrored line 1 - s lies in Re > 1
            s = x + 1j * (y0 + dy * np.arange(ny))
            zw = self.on_line(1.0 - x, -y0, -dy, ny)
            logfac = s * LN2 + (s - 1) * LOG_PI + _log_sin(np.pi * s / 2) + cloggamma(1.0 - s)
            return np.exp(logfac) * zw
        out = np.empty(ny, dtype=complex)
        for k0, k1 in _line_bands(ny):
            ys = y0 + dy * np.arange(k0, k1)
            n = _borwein_terms(max(abs(ys[0]), abs(ys[-1])))
            n = int(math.ceil(n / 16) * 16)
            eta = kernels.dirichlet_line(_borwein_weights(n), log_n(n), x, ys[0], dy, k1 - k0)
            out[k0:k1] = eta / _eta_prefactor(x + 1j * ys)
        return out


def zeta(z, strategy: EvaluationStrategy | None = None, terms: int | None = None):
    """Riemann zeta; eta acceleration for Re z > 0, reflection for Re z <= 0."""
    scalar = np.ndim(z) == 0
    s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(s == 1):
        raise PoleError("zeta has a pole at z = 1")
    if strategy is EvaluationStrategy.NakedSeries:
        N = terms or default_terms(s)
        out = kernels.dirichlet_points(np.ones(N, dtype=complex), log_n(N), s)
    elif strategy is EvaluationStrategy.HurwitzEM:
        out = hurwitz_em(s, 1.0)
    elif strategy is EvaluationStrategy.EtaAccelerated:
        out = _zeta_eta(s)
    elif strategy is EvaluationStrategy.Reflect:
        out = _zeta_reflect(s)
    elif strategy is None:
        out = np.empty_like(s)
        left = (s.real <= 0) & (np.abs(s) > 1e-3)
        if np.any(left):
            out[left] = _zeta_reflect(s[left])
        if np.any(~left):
            out[~left] = _zeta_eta(s[~left])
    else:
        raise ValueError(f"strategy {strategy} not available for zeta")
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def _zeta_eta(s):
    # Near the prefactor pole lines (and z = 1) the Euler-Maclaurin route is used.
    out = np.empty_like(s)
    pre = _eta_prefactor(s)
    near = (np.abs(pre) < 1e-3) | (np.abs(s - 1) < 1e-3)
    if np.any(near):
        out[near] = hurwitz_em(s[near], 1.0)
    if np.any(~near):
        out[~near] = eta_borwein(s[~near]) / pre[~near]
    return out


def _zeta_reflect(s):
    w = 1.0 - s
    out = np.zeros_like(s)
    # trivial zeros at negative even integers
    triv = (s.imag == 0) & (s.real < 0) & (np.mod(s.real, 2) == 0)
    ok = ~triv
    if np.any(ok):
        sv, wv = s[ok], w[ok]
        zw = _zeta_eta(wv) if np.all(wv.real > 0) else zeta(wv)
        logfac = sv * LN2 + (sv - 1) * LOG_PI + _log_sin(np.pi * sv / 2) + cloggamma(wv)
        out[ok] = np.exp(logfac) * zw
    return out


def _log_sin(x):
    # log sin(x) for complex x, stable for large |Im x|
    y = np.abs(x.imag)
    out = np.empty_like(x)
    small = y < 30
    out[small] = np.log(np.sin(x[small]))
    xb = x[~small]
    sg = np.sign(xb.imag)
    out[~small] = -1j * sg * xb - np.log(2j * -sg) + np.log1p(-np.exp(2j * sg * xb))
    return out


def _log_cos(x):
    return _log_sin(x + np.pi / 2)


# ---------------------------------------------------------------------------
# Generic specs

def log_gamma_r(s):
    return -0.5 * s * LOG_PI + cloggamma(s / 2)


@dataclass(frozen=True)
class LFunctionSpec:
    source: CoefficientSource | None
    conductor: int = 1
    weight: float = 1.0
    gamma_shifts: tuple = (0.0,)
    sign: complex = 1.0
    conjugate_source: CoefficientSource | None = None
    label: str = ""
    pole_order_at_1: int = 0
    evaluator: Callable | None = field(default=None, compare=False, repr=False)
    dual_evaluator: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if abs(abs(complex(self.sign)) - 1) > 1e-12:
            raise ValueError("sign must have modulus 1")
        if len(self.gamma_shifts) < 1:
            raise ValueError("at least one gamma shift required")

    @property
    def self_dual(self):
        return self.conjugate_source is None and self.dual_evaluator is None

    def __call__(self, z):
        return self.evaluate(z)

    def on_line(self, x, y0, dy, ny):
        f = self.evaluator
        if f is not None and hasattr(f, "on_line"):
            return f.on_line(x, y0, dy, ny)
        return self.evaluate(x + 1j * (y0 + dy * np.arange(ny)))

    def evaluate(self, z, strategy: EvaluationStrategy | None = None, terms: int | None = None):
        scalar = np.ndim(z) == 0
        s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        if strategy is EvaluationStrategy.NakedSeries or (strategy is None and self.evaluator is None):
            src = self.source
            N = terms or default_terms(s)
            if src.max_terms is not None:
                N = min(N, src.max_terms)
            out = eval_partial(src, s, N)
        elif strategy is EvaluationStrategy.Reflect:
            out = self.reflect(s)
        else:
            out = np.asarray(self.evaluator(s), dtype=complex)
        return complex(out[0]) if scalar else out.reshape(np.shape(z))

    def dual_evaluate(self, s):
        if self.dual_evaluator is not None:
            return self.dual_evaluator(s)
        if self.conjugate_source is not None:
            # conj(L(conj s)) for a series with conjugated coefficients
            return np.conj(self.evaluate(np.conj(s)))
        return self.evaluate(s)

    def log_gamma_factor(self, s):
        s = np.asarray(s, dtype=complex)
        acc = 0.5 * s * math.log(self.conductor)
        for lam in self.gamma_shifts:
            acc = acc + log_gamma_r(s + lam)
        return acc

    def reflect(self, s):
        """L(s) from the functional equation and the dual at w - s."""
        w = self.weight - s
        lg = self.log_gamma_factor(w) - self.log_gamma_factor(s)
        return self.sign * np.exp(lg) * self.dual_evaluate(w)

    def completed(self, z):
        s = np.asarray(z, dtype=complex)
        return np.exp(self.log_gamma_factor(s)) * self.evaluate(s)


def fe_residual(spec: LFunctionSpec, z, sign=None) -> np.ndarray:
    """Relative mismatch of Lambda(z) and eps * dual-Lambda(w - z).

    Both sides are divided by |gamma factor| at the centre point of the same
    height, a positive constant per height that keeps the residual
    meaningful where Gamma decays exponentially.
    """
    s = np.atleast_1d(np.asarray(z, dtype=complex))
    eps = spec.sign if sign is None else sign
    w = spec.weight - s
    centre = spec.weight / 2 + 1j * s.imag
    scale = np.real(spec.log_gamma_factor(centre))
    lhs = np.exp(spec.log_gamma_factor(s) - scale) * spec.evaluate(s)
    rhs = eps * np.exp(spec.log_gamma_factor(w) - scale) * spec.dual_evaluate(w)
    res = np.abs(lhs - rhs) / (1 + np.abs(lhs))
    return res if np.ndim(z) else float(res[0])


def xi_completed(spec: LFunctionSpec | None, z):
    """Completed function; for zeta the Riemann xi, otherwise Lambda(z)."""
    s = np.asarray(z, dtype=complex)
    if spec is None or spec.label == "zeta":
        lg = -0.5 * s * LOG_PI + cloggamma(s / 2)
        return 0.5 * s * (s - 1) * np.exp(lg) * zeta(s)
    return spec.completed(s)


# ---------------------------------------------------------------------------
# Zeta and Dirichlet L

def zeta_spec() -> LFunctionSpec:
    ones = FunctionSource(lambda n: np.ones(n.size))
    return LFunctionSpec(ones, 1, 1.0, (0.0,), 1.0, label="zeta", pole_order_at_1=1,
                         evaluator=ZetaFunction())


class _DirichletEvaluator:
    def __init__(self, cast, reflect_spec=None, euler_primes=(), primitive=None):
        self.engine = PeriodicDirichlet(cast)
        self.cast = cast
        self.reflect_spec = reflect_spec
        self.euler_primes = euler_primes
        self.primitive = primitive

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty_like(s)
        left = (s.real <= 0) & (np.abs(s) > 1e-3)
        if np.any(~left):
            out[~left] = self.engine(s[~left])
        if np.any(left):
            sl = s[left]
            prim = self.reflect_spec.reflect(sl)
            for p, chip in self.euler_primes:
                prim = prim * (1 - chip * np.exp(-sl * math.log(p)))
            out[left] = prim
        return out

    def on_line(self, x, y0, dy, ny):
        if x <= 0:
            return self(x + 1j * (y0 + dy * np.arange(ny)))
        return self.engine.on_line(x, y0, dy, ny)


class _PrincipalEvaluator:
    def __init__(self, k):
        self.primes = [p for p, _ in factorize(k)] if k > 1 else []

    def _factor(self, s):
        f = np.ones_like(s)
        for p in self.primes:
            f = f * (1 - np.exp(-s * math.log(p)))
        return f

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        return zeta(s) * self._factor(s)

    def on_line(self, x, y0, dy, ny):
        s = x + 1j * (y0 + dy * np.arange(ny))
        return ZetaFunction().on_line(x, y0, dy, ny) * self._factor(s)


@lru_cache(maxsize=256)
def dirichlet_spec(k: int, label) -> LFunctionSpec:
    table = enumerate_characters(k)
    chi = table[label]
    j = table.labels[table.index(label)][1]
    name = f"L({k},{j})"
    src = PeriodicSource(chi)
    if is_principal(chi):
        return LFunctionSpec(src, 1, 1.0, (0.0,), 1.0, label=name, pole_order_at_1=1,
                             evaluator=_PrincipalEvaluator(k))
    prim = primitive_of(chi)
    q = prim.period
    a = parity(prim)
    eps = gauss_sum(prim) / (1j ** a * math.sqrt(q))
    eps = eps / abs(eps)
    prim_conj = prim.conj()
    self_dual = all(abs(v.imag) < 1e-14 for v in prim.values)
    prim_eval = PeriodicDirichlet(prim)
    dual_eval = None if self_dual else PeriodicDirichlet(prim_conj)
    prim_spec = LFunctionSpec(PeriodicSource(prim), q, 1.0, (float(a),), complex(eps),
                              None if self_dual else PeriodicSource(prim_conj),
                              label=f"primitive of {name}", evaluator=prim_eval,
                              dual_evaluator=dual_eval)
    euler = tuple((p, prim(p)) for p, _ in factorize(k) if q % p != 0)
    ev = _DirichletEvaluator(chi, prim_spec, euler, prim)
    if not euler:
        dual = None if self_dual else _DirichletEvaluator(chi.conj(), replace(
            prim_spec, sign=complex(np.conj(eps)), evaluator=dual_eval, dual_evaluator=prim_eval))
        return LFunctionSpec(src, q, 1.0, (float(a),), complex(eps),
                             None if self_dual else PeriodicSource(chi.conj()),
                             label=name, evaluator=ev, dual_evaluator=dual)
    # imprimitive: the FE data describe the primitive character only
    return LFunctionSpec(src, q, 1.0, (float(a),), complex(eps), None, label=name + " (imprimitive)",
                         evaluator=ev)


def dirichlet_L(k: int, label, z, strategy: EvaluationStrategy | None = None):
    spec = dirichlet_spec(k, label)
    if strategy is EvaluationStrategy.NakedSeries:
        return spec.evaluate(z, strategy)
    s = np.asarray(z, dtype=complex)
    if spec.pole_order_at_1 and np.any(np.abs(s - 1) < 1e-3):
        if np.any(s == 1):
            raise PoleError("principal character has a pole at z = 1")
    if strategy is EvaluationStrategy.Reflect:
        ev = spec.evaluator
        return spec.evaluate(z, strategy) if not isinstance(ev, _DirichletEvaluator) else \
            _reflect_imprimitive(ev, z)
    return spec.evaluate(z)


def _reflect_imprimitive(ev, z):
    s = np.atleast_1d(np.asarray(z, dtype=complex))
    out = ev.reflect_spec.reflect(s)
    for p, chip in ev.euler_primes:
        out = out * (1 - chip * np.exp(-s * math.log(p)))
    return out if np.ndim(z) else complex(out[0])


def cast_lfunction(cast: CoefficientCast, label="cast") -> LFunctionSpec:
    """A periodic cast as an evaluable with no assumed functional equation."""
    return LFunctionSpec(PeriodicSource(cast), cast.period, 1.0, (0.0,), 1.0, label=label,
                         evaluator=PeriodicDirichlet(cast))


# ---------------------------------------------------------------------------
# Hurwitz

def hurwitz(z, a, strategy: EvaluationStrategy | None = None):
    """Hurwitz zeta(z, a) for a in (0, 1]; rational a reflects for Re z <= 0."""
    from fractions import Fraction
    scalar = np.ndim(z) == 0
    s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    af = Fraction(a).limit_denominator(10 ** 6) if not isinstance(a, Fraction) else a
    aval = float(a)
    if not 0 < aval <= 1:
        raise DomainError("Hurwitz parameter must lie in (0, 1]")
    if np.any(s == 1):
        raise PoleError("Hurwitz zeta has a pole at z = 1")
    out = np.empty_like(s)
    exact = abs(float(af) - aval) < 1e-15
    left = (s.real <= 0) & (np.abs(s) > 1e-3) & exact if strategy is not EvaluationStrategy.HurwitzEM else np.zeros(s.size, bool)
    if strategy is EvaluationStrategy.Reflect:
        left = np.ones(s.size, bool)
    if np.any(~left):
        out[~left] = hurwitz_em(s[~left], aval)
    if np.any(left):
        out[left] = _hurwitz_reflect(s[left], af.numerator, af.denominator)
    return complex(out[0]) if scalar else out


def _hurwitz_reflect(s, p, q):
    """zeta(1-w, p/q) = 2 Gamma(w) (2 pi q)^{-w} sum_k cos(pi w/2 - 2 pi k p/q) zeta(w, k/q)."""
    w = 1 - s
    acc = np.zeros_like(s)
    lg = cloggamma(w) - w * math.log(2 * math.pi * q)
    for kk in range(1, q + 1):
        ang = np.pi * w / 2 - 2 * np.pi * kk * p / q
        acc = acc + np.exp(lg + _log_cos_safe(ang)) * hurwitz_em(w, kk / q)
    return 2 * acc


def _log_cos_safe(x):
    out = np.empty_like(x)
    big = np.abs(x.imag) >= 30
    out[~big] = np.log(np.cos(x[~big]) + 0j)
    if np.any(big):
        out[big] = _log_cos(x[big])
    return out


# ---------------------------------------------------------------------------
# Davenport-Heilbronn

def dh_cast(variant) -> CoefficientCast:
    v = tuple(variant) if not isinstance(variant, str) else tuple(int(t) for t in variant.strip("()").split(","))
    if v == (5, 1):
        x = XI_DH
        return cast_from([0, 1, x, -x, -1])
    if v == (5, 2):
        x = XI_DH
        return cast_from([0, 1, -1 / x, 1 / x, -1])
    if v == (7, 1):
        a = ALPHA_DH7
        return cast_from([0, 1, -(1 + a), -a, a, 1 + a, -1])
    raise ValueError(f"unknown Davenport-Heilbronn variant {variant!r}")


class _DHEvaluator:
    def __init__(self, cast, spec_ref):
        self.engine = PeriodicDirichlet(cast)
        self.spec_ref = spec_ref

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty_like(s)
        left = (s.real <= 0) & (np.abs(s) > 1e-3)
        if np.any(~left):
            out[~left] = self.engine(s[~left])
        if np.any(left):
            sl = s[left]
            spec = self.spec_ref()
            w = 1 - sl
            out[left] = spec.sign * np.exp(spec.log_gamma_factor(w) - spec.log_gamma_factor(sl)) * self.engine(w)
        return out

    def on_line(self, x, y0, dy, ny):
        if x <= 0:
            return self(x + 1j * (y0 + dy * np.arange(ny)))
        return self.engine.on_line(x, y0, dy, ny)


@lru_cache(maxsize=8)
def dh_spec(variant=(5, 1)) -> LFunctionSpec:
    cast = dh_cast(variant)
    holder = {}
    ev = _DHEvaluator(cast, lambda: holder["spec"])
    # signs measured with fe_residual: +1 for (5,1), -1 for (5,2) and (7,1)
    sign = 1.0 if tuple(variant) == (5, 1) else -1.0
    spec = LFunctionSpec(PeriodicSource(cast), cast.period, 1.0, (1.0,), sign,
                         label=f"DH{tuple(variant)}", evaluator=ev)
    holder["spec"] = spec
    return spec


def davenport_heilbronn(variant, z, strategy: EvaluationStrategy | None = None):
    return dh_spec(tuple(variant)).evaluate(z, strategy)


# ---------------------------------------------------------------------------
# Cusp-form Mellin evaluation (elliptic curves, modular forms, Hecke on Z[i])

class CuspMellin:
    """L(s) for coefficients of a weight-k cusp form of level N, any s.

    Lambda(s) = (sqrt(N)/2 pi)^s Gamma(s) L(s) = int_0^inf F(y) y^{s-1} dy with
    F(y) = sum a_n exp(-2 pi n y / sqrt(N)).  The integral is taken along
    the ray arg y = phi by the trapezoid rule in log y; turning the ray
    towards the imaginary axis cancels the exponential decay of Gamma at
    large |Im s|.  No functional equation is assumed, so the sign can be
    measured against it.
    """

    DIGITS = 36.0

    def __init__(self, source: CoefficientSource, level: float, weight: float, shift: float = 0.0):
        # weight is that of L itself (FE z <-> weight - z); the underlying
        # form has coefficients a_n n^shift and weight weight + 2 shift
        self.source = source
        self.level = float(level)
        self.shift = float(shift)
        self.weight = float(weight) + 2 * self.shift
        self._node_cache = {}

    def terms_needed(self, phi):
        c = math.cos(phi)
        rmin = 2 * math.pi * c / (self.DIGITS * math.sqrt(self.level))
        extra = 0.5 * max(self.weight - 1, 0) * 12
        return int(math.ceil((self.DIGITS + extra) * math.sqrt(self.level) / (2 * math.pi * rmin * c)))

    def _nodes(self, phi):
        key = round(phi, 12)
        if key in self._node_cache:
            return self._node_cache[key]
        sq = math.sqrt(self.level)
        c = math.cos(phi)
        theta0 = math.pi / 2 - abs(phi)
        h = min(0.02, 2 * math.pi * theta0 / 40)
        rmin = 2 * math.pi * c / (self.DIGITS * sq)
        rmax = (self.DIGITS + 4 * self.weight) * sq / (2 * math.pi * c)
        u = np.arange(math.log(rmin), math.log(rmax) + h, h)
        y = np.exp(u + 1j * phi)
        nmax = self.terms_needed(phi)
        if self.source.max_terms is not None and self.source.max_terms < nmax:
            raise ValueError(f"Mellin evaluation needs {nmax} coefficients, "
                             f"only {self.source.max_terms} available")
        a = self.source.coeffs(nmax)
        if self.shift:
            a = a * np.arange(1, nmax + 1, dtype=float) ** self.shift
        nlog = np.arange(1, nmax + 1, dtype=float).astype(complex)
        F = np.empty(y.size, dtype=complex)
        extra = 0.5 * max(self.weight - 1, 0) * 12
        for j0 in range(0, y.size, 16):
            blk = y[j0:j0 + 16]
            n_here = int(math.ceil((self.DIGITS + extra) * sq / (2 * math.pi * blk.real.min())))
            n_here = min(max(n_here, 1), nmax)
            F[j0:j0 + 16] = kernels.dirichlet_points(a[:n_here], nlog[:n_here], 2 * math.pi * blk / sq)
        self._node_cache[key] = (u + 1j * phi, h * F)
        return self._node_cache[key]

    @staticmethod
    def _phi_for(t):
        return math.copysign(max(0.0, math.pi / 2 - 12.0 / abs(t)), t) if t else 0.0

    def completed(self, s):
        """(sqrt(N)/2pi)^s Gamma(s) L(s) at the (already shifted) points s."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty_like(s)
        # bands in |t| share one ray; the ray is set by the band's largest |t|
        key = np.where(np.abs(s.imag) < 12 * 2 / math.pi, 0.0,
                       np.sign(s.imag) * np.ceil(np.abs(s.imag) / 4) * 4)
        for kv in np.unique(key):
            idx = np.flatnonzero(key == kv)
            phi = self._phi_for(kv)
            logy, hF = self._nodes(phi)
            out[idx] = np.exp(np.outer(s[idx], logy)) @ hF
        return out

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        s = z + self.shift
        lam = self.completed(s)
        lg = s * math.log(math.sqrt(self.level) / (2 * math.pi)) + _safe_loggamma(s)
        return lam * np.exp(-lg)


def _safe_loggamma(s):
    out = np.empty_like(s)
    pole = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))
    out[pole] = np.inf
    if np.any(~pole):
        out[~pole] = cloggamma(s[~pole])
    return out


def cusp_spec(source: CoefficientSource, level: int, weight: float, sign: complex = 1.0,
              label: str = "cusp form", shift: float = 0.0) -> LFunctionSpec:
    """Spec for a self-dual cusp-form L-function evaluated by CuspMellin."""
    ev = CuspMellin(source, level, weight, shift)
    return LFunctionSpec(source, int(level), float(weight), (shift, shift + 1.0), complex(sign),
                         label=label, evaluator=ev)


def measure_sign(spec: LFunctionSpec, points=None, candidates=(1.0, -1.0), tol=1e-4):
    """Pick the sign whose functional-equation residual is below tol at all points."""
    if points is None:
        rng = np.random.Generator(np.random.PCG64(12345))
        w = spec.weight
        points = (w / 2 + rng.uniform(-0.45, 0.45, 10) * w) + 1j * rng.uniform(-8, 8, 10)
    best = None
    for eps in candidates:
        r = float(np.max(fe_residual(spec, points, sign=eps)))
        if best is None or r < best[1]:
            best = (eps, r)
    if best[1] >= tol:
        raise ArithmeticError(f"no sign fits the functional equation (best residual {best[1]:.2e})")
    return best


# ---------------------------------------------------------------------------
# Dedekind zeta and Hecke L on Z[i]

def dedekind_coeffs(N: int) -> np.ndarray:
    return r2_quarter(N)[1:].astype(complex)


class _DedekindEvaluator:
    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        return zeta(s) * dirichlet_L(4, (4, 2), s)


def dedekind_spec() -> LFunctionSpec:
    src = FunctionSource(lambda n: r2_quarter(int(n[-1]))[n])
    return LFunctionSpec(src, 4, 1.0, (0.0, 1.0), 1.0, label="Dedekind Z[i]", pole_order_at_1=1,
                         evaluator=_DedekindEvaluator())


def dedekind_series(z, N: int = 400000) -> complex:
    """Lattice series for Re z > 1 with the mean-density tail (pi/4) N^{1-z}/(z-1)."""
    z = complex(z)
    c = dedekind_coeffs(N)
    head = complex(kernels.dirichlet_points(c, log_n(N), np.array([z]))[0])
    return head + (math.pi / 4) * cmath.exp((1 - z) * math.log(N + 0.5)) / (z - 1)


def dedekind_mellin(z, cfg: QuadratureConfig | None = None) -> complex:
    """zeta_o(z) = pi^z / Gamma(z) [int_1^inf (y^z + y^{1-z}) Theta(y)/(4y) dy + 1/(4(z-1)) - 1/(4z)]."""
    z = complex(z)
    if z == 1 or z == 0:
        raise PoleError("Mellin form singular at z = 0, 1")
    cfg = cfg or QuadratureConfig(abs_tol=1e-15, rel_tol=1e-12, max_depth=40)

    def integrand(y):
        th = theta0(y) ** 2 - 1.0
        return (cmath.exp(z * math.log(y)) + cmath.exp((1 - z) * math.log(y))) * th / (4 * y)

    body = adaptive_quad(integrand, 1.0, math.inf, cfg) + 1 / (4 * (z - 1)) - 1 / (4 * z)
    return cmath.exp(z * LOG_PI - complex(cloggamma(z))) * body


def dedekind_Zi(z, strategy: EvaluationStrategy | None = None, terms: int | None = None):
    scalar = np.ndim(z) == 0
    s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(s == 1):
        raise PoleError("Dedekind zeta has a pole at z = 1")
    spec = dedekind_spec()
    if strategy is EvaluationStrategy.NakedSeries:
        out = spec.evaluate(s, strategy, terms)
    elif strategy is EvaluationStrategy.MellinTheta:
        out = np.array([dedekind_mellin(v) for v in s])
    elif strategy is EvaluationStrategy.Reflect:
        out = spec.reflect(s)
    elif strategy is None:
        out = np.empty_like(s)
        for i, v in enumerate(s):
            if v.real > 1:
                out[i] = dedekind_series(v, terms or 400000)
            elif v.real > 0:
                out[i] = dedekind_mellin(v)
            else:
                out[i] = complex(spec.reflect(np.array([v]))[0])
    else:
        out = spec.evaluate(s)
    return complex(out[0]) if scalar else out


def hecke_coeffs(l: int, N: int) -> np.ndarray:
    """c(n) = 1/4 sum_{|alpha|^2 = n} (alpha / conj alpha)^l for n = 1..N."""
    if l % 2 or l == 0:
        raise DomainError("Hecke character exponent must be even and nonzero")
    R = math.isqrt(N)
    m = np.arange(-R, R + 1)
    mm, nn = np.meshgrid(m, m, indexing="ij")
    norm = (mm ** 2 + nn ** 2).ravel()
    ang = np.arctan2(nn, mm).ravel()
    keep = (norm > 0) & (norm <= N)
    out = np.zeros(N + 1, dtype=complex)
    np.add.at(out, norm[keep], np.exp(2j * l * ang[keep]))
    out = out / 4
    out.imag[np.abs(out.imag) < 1e-12] = 0.0
    return out[1:]


def hecke_lattice_sum(l: int, z, radius: float) -> complex:
    """Radially truncated 1/4 sum over 0 < |alpha| <= radius of (alpha/conj alpha)^l |alpha|^{-2z}."""
    N = int(radius * radius)
    c = hecke_coeffs(l, N)
    return complex(kernels.dirichlet_points(c, log_n(N), np.array([complex(z)]))[0])


@lru_cache(maxsize=16)
def hecke_spec(l: int) -> LFunctionSpec:
    if l % 2 or l == 0:
        raise DomainError("Hecke character exponent must be even and nonzero")
    L = abs(l)
    src = FunctionSource(lambda n: hecke_coeffs(l, int(n[-1]))[n - 1])
    # theta series of weight 2|l|+1 on level 4, so L(z) = L_f(z + |l|)
    ev = CuspMellin(src, 4, 1.0, shift=L)
    return LFunctionSpec(src, 4, 1.0, (float(L), L + 1.0), (-1.0) ** l, label=f"Hecke Z[i] l={l}",
                         evaluator=ev)


def hecke_Zi(l: int, z, strategy: EvaluationStrategy | None = None):
    spec = hecke_spec(l)
    s = np.atleast_1d(np.asarray(z, dtype=complex))
    if strategy is None:
        out = np.where(s.real <= 0, 0, 0).astype(complex)
        left = (s.real <= 0) & (np.abs(s) > 1e-3)
        if np.any(left):
            out[left] = spec.reflect(s[left])
        if np.any(~left):
            out[~left] = spec.evaluate(s[~left])
    else:
        out = spec.evaluate(s, strategy)
    return out if np.ndim(z) else complex(out[0])


# ---------------------------------------------------------------------------
# File format

def save_lfunction(spec: LFunctionSpec, path, N_terms: int | None = None) -> None:
    n = N_terms or spec.source.max_terms or 1000
    coeffs = spec.source.coeffs(n)
    sign = complex(spec.sign)
    lines = [
        f"label={spec.label}",
        f"conductor={spec.conductor}",
        f"weight={spec.weight!r}",
        f"sign_re={sign.real!r} sign_im={sign.imag!r}",
        "gamma=" + ",".join(_fmt_complex(complex(g)) for g in spec.gamma_shifts),
        f"poles={spec.pole_order_at_1}",
        "coeffs:",
    ]
    lines += [f"{float(c.real)!r} {float(c.imag)!r}" for c in coeffs]
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt_complex(c):
    return repr(c.real) if c.imag == 0 else f"{c.real!r}{c.imag:+}j"


def load_lfunction(path) -> LFunctionSpec:
    """Read the plain-text L-function format; cusp-type gamma data get a Mellin evaluator."""
    meta = {}
    coeffs = []
    in_coeffs = False
    for i, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_coeffs:
            parts = line.replace(",", " ").split()
            try:
                if len(parts) == 1:
                    coeffs.append(complex(float(parts[0]), 0.0))
                elif len(parts) == 2:
                    coeffs.append(complex(float(parts[0]), float(parts[1])))
                else:
                    raise ValueError
            except ValueError:
                raise ParseError(f"bad coefficient line {line!r}", i) from None
            continue
        if line == "coeffs:":
            in_coeffs = True
            continue
        for item in line.split():
            if "=" not in item and not line.startswith("label="):
                raise ParseError(f"expected key=value, got {item!r}", i)
        if line.startswith("label="):
            meta["label"] = line.split("=", 1)[1]
            continue
        for item in line.split():
            key, val = item.split("=", 1)
            meta[key] = (val, i)
    if not coeffs:
        raise ParseError("empty coefficient list")
    try:
        N = int(meta.get("conductor", ("1", 0))[0])
        w = float(meta.get("weight", ("1", 0))[0])
        sign = complex(float(meta.get("sign_re", ("1", 0))[0]), float(meta.get("sign_im", ("0", 0))[0]))
        gam = tuple(complex(g.replace(" ", "")) for g in meta.get("gamma", ("0", 0))[0].split(",") if g)
        poles = int(meta.get("poles", ("0", 0))[0])
    except ValueError as exc:
        raise ParseError(f"malformed header value: {exc}") from exc
    gam = tuple(g.real if g.imag == 0 else g for g in gam)
    src = ListSource(coeffs)
    label = meta.get("label", Path(path).stem)
    ev = None
    if len(gam) == 2 and abs(complex(gam[1]) - complex(gam[0]) - 1) < 1e-12 and complex(gam[0]).imag == 0:
        ev = CuspMellin(src, N, w, float(complex(gam[0]).real))
    return LFunctionSpec(src, N, w, gam, sign, label=label, pole_order_at_1=poles, evaluator=ev)
