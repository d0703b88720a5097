"""Exact q-expansions, Eisenstein series, Hecke operators and eigenforms."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .arithmetic import bernoulli_numbers, factorize, prime_array, sigma
from .errors import DomainError, ParseError
from .lfunctions import LFunctionSpec, cusp_spec, measure_sign
from .series import EulerFactorSource, ListSource


@dataclass(frozen=True)
class QExpansion:
    """f = sum_{n <= M} a_n q^n with exact rational coefficients."""
    weight: int
    level: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_cusp(self) -> bool:
        return self.coeffs[0] == 0

    def __getitem__(self, n):
        return self.coeffs[n]

    def truncate(self, M: int) -> "QExpansion":
        return QExpansion(self.weight, self.level, self.coeffs[:M + 1])

    def _check_add(self, other):
        if self.weight != other.weight:
            raise DomainError(f"weight mismatch: {self.weight} vs {other.weight}")

    def __add__(self, other):
        self._check_add(other)
        M = min(self.truncation, other.truncation)
        return QExpansion(self.weight, max(self.level, other.level),
                          [a + b for a, b in zip(self.coeffs[:M + 1], other.coeffs[:M + 1])])

    def __neg__(self):
        return QExpansion(self.weight, self.level, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            c = Fraction(other)
            return QExpansion(self.weight, self.level, [c * a for a in self.coeffs])
        M = min(self.truncation, other.truncation)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (M + 1)
        for i in range(M + 1):
            if a[i]:
                ai = a[i]
                for j in range(M + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return QExpansion(self.weight + other.weight, _lcm(self.level, other.level), out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("negative powers are not supported")
        out = one(self.truncation, self.level)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def to_array(self, start: int = 1, dtype=float) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs[start:]], dtype=dtype)

    def __str__(self):
        terms = [f"{c}q^{n}" for n, c in enumerate(self.coeffs[:10]) if c]
        return " + ".join(terms) + f" + O(q^{self.truncation + 1})"


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def one(M: int, level: int = 1) -> QExpansion:
    return QExpansion(0, level, [1] + [0] * M)


def eisenstein(k: int, M: int) -> QExpansion:
    """E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise DomainError("Eisenstein weight must be even and >= 4")
    Bk = bernoulli_numbers(k)[k]
    c = Fraction(-2 * k) / Bk
    return QExpansion(k, 1, [Fraction(1)] + [c * sigma(n, k - 1) for n in range(1, M + 1)])


def delta(M: int) -> QExpansion:
    """Discriminant form (E_4^3 - E_6^2) / 1728."""
    return (eisenstein(4, M) ** 3 - eisenstein(6, M) ** 2) * Fraction(1, 1728)


def qexp_arith(op: str, *args) -> QExpansion:
    """add, mul, pow (f, e) or linear_comb ([c_i], [f_i])."""
    if op == "add":
        out = args[0]
        for f in args[1:]:
            out = out + f
        return out
    if op == "mul":
        out = args[0]
        for f in args[1:]:
            out = out * f
        return out
    if op == "pow":
        return args[0] ** int(args[1])
    if op == "linear_comb":
        cs, fs = args
        if len(cs) != len(fs) or not fs:
            raise DomainError("linear_comb needs equal-length, non-empty lists")
        out = fs[0] * cs[0]
        for c, f in zip(cs[1:], fs[1:]):
            out = out + f * c
        return out
    raise DomainError(f"unknown q-expansion operation {op!r}")


def hecke_Tp(f: QExpansion, p: int, M_out: int | None = None) -> QExpansion:
    """b_m = a_{mp} + p^{k-1} a_{m/p}; the second term is absent when p | level (U_p)."""
    if len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
        raise DomainError(f"{p} is not prime")
    if M_out is None:
        M_out = f.truncation // p
    if M_out * p > f.truncation:
        raise DomainError(f"truncation {f.truncation} too short for T_{p} up to q^{M_out}")
    a = f.coeffs
    bad = f.level % p == 0
    pk = Fraction(p) ** (f.weight - 1)
    out = []
    for m in range(M_out + 1):
        b = a[m * p]
        if not bad and m % p == 0:
            b += pk * a[m // p]
        out.append(b)
    return QExpansion(f.weight, f.level, out)


@dataclass
class HeckeData:
    """T_p on an echelon basis: matrix rows are T_p(f_i) in the basis."""
    p: int
    matrix: list
    charpoly: list
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    eigenforms: list = field(default_factory=list)

    def matrix_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])


def check_echelon(basis: list) -> int:
    g = len(basis)
    for i, f in enumerate(basis):
        if f.truncation < g:
            raise DomainError("basis truncation shorter than its dimension")
        if f.coeffs[0] != 0:
            raise DomainError("echelon basis must consist of cusp forms")
        for j in range(1, g + 1):
            if f.coeffs[j] != (1 if j == i + 1 else 0):
                raise DomainError(f"basis element {i} is not echelon at q^{j}")
    return g


def hecke_matrix(basis: list, p: int, k: int | None = None) -> HeckeData:
    g = check_echelon(basis)
    if k is not None and any(f.weight != k for f in basis):
        raise DomainError("basis weight does not match k")
    images = [hecke_Tp(f, p, g) for f in basis]
    # T_p f_i = sum_j b_j(T_p f_i) f_j by back-substitution on leading q^1..q^g
    T = [[img.coeffs[j] for j in range(1, g + 1)] for img in images]
    cp = charpoly(T)
    lam = poly_roots(cp)
    vecs, forms = [], []
    for ev in lam:
        x = _left_null(T, ev)
        vecs.append(x)
        forms.append(_combine(basis, x))
    return HeckeData(p, T, cp, np.asarray(lam), np.asarray(vecs), forms)


def charpoly(T: list) -> list:
    """Monic characteristic polynomial coefficients, highest degree first (Faddeev-LeVerrier)."""
    n = len(T)
    A = [[Fraction(x) for x in row] for row in T]
    M = [[Fraction(0)] * n for _ in range(n)]
    c = [Fraction(1)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        M = [[sum(A[i][l] * M[l][j] for l in range(n)) + (c[-1] if i == j else 0)
              for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c.append(-sum(AM[i][i] for i in range(n)) / k)
    return c


def _rational_roots(cp: list) -> list:
    den = 1
    for c in cp:
        den = _lcm(den, Fraction(c).denominator)
    ints = [int(c * den) for c in cp]
    while ints and ints[-1] == 0:
        ints.pop()
    roots = [Fraction(0)] * (len(cp) - len(ints))
    if len(ints) <= 1:
        return roots
    lead, const = abs(ints[0]), abs(ints[-1])
    cands = set()
    for a in _divisors(const):
        for b in _divisors(lead):
            cands.add(Fraction(a, b))
            cands.add(Fraction(-a, b))
    for r in sorted(cands):
        if sum(Fraction(c) * r ** (len(ints) - 1 - i) for i, c in enumerate(ints)) == 0:
            roots.append(r)
    return roots


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0] if n < 10 ** 6 else [1, n]


def _deflate(cp: list, r) -> list:
    out = [cp[0]]
    for c in cp[1:-1]:
        out.append(c + r * out[-1])
    return out


def poly_roots(cp: list) -> list:
    """Exact rational roots first, then closed forms (degree <= 4) or deflated Newton."""
    roots, rest = [], list(cp)
    for r in _rational_roots(cp):
        while len(rest) > 1 and sum(c * r ** (len(rest) - 1 - i) for i, c in enumerate(rest)) == 0:
            rest = _deflate(rest, r)
            roots.append(r)
    other = _float_roots([complex(c) for c in rest]) if len(rest) > 1 else []
    full = [complex(c) for c in cp]
    other = [_newton_polish(full, z) for z in other]
    out = [float(r) for r in roots] + [z.real if abs(z.imag) < 1e-12 else z for z in other]
    real = all(not isinstance(z, complex) for z in out)
    return sorted(out) if real else sorted(out, key=lambda z: (complex(z).real, complex(z).imag))


def _float_roots(c: list) -> list:
    c = [x / c[0] for x in c]
    d = len(c) - 1
    if d == 1:
        return [-c[1]]
    if d == 2:
        b, q = c[1], c[2]
        s = cmath.sqrt(b * b - 4 * q)
        return [(-b + s) / 2, (-b - s) / 2]
    if d == 3:
        return _cubic(c[1], c[2], c[3])
    if d == 4:
        return _quartic(c[1], c[2], c[3], c[4])
    return _durand_kerner(c)


def _cubic(a, b, c):
    # depressed t^3 + p t + q with x = t - a/3
    p = b - a * a / 3
    q = 2 * a ** 3 / 27 - a * b / 3 + c
    disc = cmath.sqrt(q * q / 4 + p ** 3 / 27)
    u = (-q / 2 + disc) ** (1 / 3)
    if abs(u) < 1e-300:
        u = (-q / 2 - disc) ** (1 / 3)
    w = cmath.exp(2j * cmath.pi / 3)
    out = []
    for k in range(3):
        uk = u * w ** k
        t = uk - p / (3 * uk) if abs(uk) > 1e-300 else 0.0
        out.append(t - a / 3)
    return out


def _quartic(a, b, c, d):
    # Ferrari: depressed y^4 + p y^2 + q y + r with x = y - a/4
    p = b - 3 * a * a / 8
    q = c - a * b / 2 + a ** 3 / 8
    r = d - a * c / 4 + a * a * b / 16 - 3 * a ** 4 / 256
    if abs(q) < 1e-14:
        zs = [cmath.sqrt(z) for z in _float_roots([1, p, r])]
        return [s * z - a / 4 for z in zs for s in (1, -1)]
    # resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0
    m = max(_cubic(p, (p * p / 4 - r), -q * q / 8), key=abs)
    s = cmath.sqrt(2 * m)
    out = []
    for sg in (1, -1):
        disc = cmath.sqrt(-(2 * p + 2 * m + sg * 2 * q / s))
        out += [(sg * s + disc) / 2 - a / 4, (sg * s - disc) / 2 - a / 4]
    return out


def _durand_kerner(c, iters=500):
    d = len(c) - 1
    z = np.array([(0.4 + 0.9j) ** k for k in range(d)])
    for _ in range(iters):
        vals = np.polyval(c, z)
        denom = np.array([np.prod([z[i] - z[j] for j in range(d) if j != i]) for i in range(d)])
        step = vals / denom
        z = z - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return list(z)


def _newton_polish(c, z, steps=3):
    dc = np.polyder(np.array(c))
    for _ in range(steps):
        f, df = np.polyval(c, z), np.polyval(dc, z)
        if df == 0 or f == 0:
            break
        z = z - f / df
    return complex(z)


def _left_null(T, lam) -> np.ndarray:
    """x with x T = lam x, normalized so the q^1 coefficient of sum x_i f_i is 1."""
    A = np.array([[float(v) for v in row] for row in T], dtype=complex).T - lam * np.eye(len(T))
    _, _, vh = np.linalg.svd(A)
    x = vh[-1].conj()
    idx = int(np.argmax(np.abs(x) > 1e-9 * np.max(np.abs(x))))
    x = x / x[idx]
    if np.max(np.abs(x.imag)) < 1e-12:
        x = x.real
    return x


def _combine(basis, x) -> np.ndarray:
    M = min(f.truncation for f in basis)
    arr = np.array([f.to_array(0)[:M + 1] for f in basis])
    return x @ arr


def sym_square_coeffs(ap: dict, k: int, bad_primes=()) -> "SymSquare":
    """Degree-3 local factors 1 - A x + A x^2 - x^3 with A = a_p^2 - 1 (normalized a_p)."""
    local = {}
    for p, a in ap.items():
        a = complex(a)
        if abs(a) > 2 + 1e-9:
            raise DomainError(f"|a_{p}| = {abs(a):.4g} exceeds 2 (not normalized?)")
        if p in bad_primes:
            local[p] = (a * a,)
        else:
            A = a * a - 1
            local[p] = (A, A, 1.0)
    return SymSquare(local, k)


@dataclass
class SymSquare:
    local: dict
    k: int

    @property
    def gamma(self) -> list:
        k = self.k
        return [0, 1, 1 - k, 2 - k, 2 - 2 * k]

    @property
    def weight_label(self) -> int:
        return 4 * self.k - 3

    def local_factor(self, p, x):
        e = self.local[p]
        return 1 + sum((-1) ** (i + 1) * c * x ** (i + 1) for i, c in enumerate(e))

    def source(self) -> EulerFactorSource:
        return EulerFactorSource(lambda p: self.local.get(p, (0,)))


def normalized_ap(coeffs, k: int, P: int) -> dict:
    """a_p / p^{(k-1)/2} for primes p <= P from a_1-indexed coefficient array."""
    return {int(p): coeffs[int(p) - 1] / p ** ((k - 1) / 2) for p in prime_array(P)}


def modular_family_coeffs(basis: list, theta: float) -> np.ndarray:
    """m0 + sqrt2 cos(2 pi theta)(m1 - m2) + sqrt2 sin(2 pi theta) m3 as c_1..c_M."""
    if len(basis) != 4:
        raise DomainError("the family needs exactly four basis expansions")
    arrs = [np.asarray(f.to_array(1) if isinstance(f, QExpansion) else f, dtype=float) for f in basis]
    if len({a.size for a in arrs}) != 1:
        raise DomainError("basis length mismatch")
    m0, m1, m2, m3 = arrs
    r2 = math.sqrt(2.0)
    return m0 + r2 * math.cos(2 * math.pi * theta) * (m1 - m2) + r2 * math.sin(2 * math.pi * theta) * m3


def form_spec(coeffs, level: int, weight: int, sign=None, label="modular form") -> LFunctionSpec:
    """L-function of a cusp form from its a_1.. coefficients; sign measured if not given."""
    src = ListSource(np.asarray(coeffs, dtype=complex))
    spec = cusp_spec(src, level, float(weight), 1.0, label=label)
    if sign is None:
        sign, _ = measure_sign(spec)
    return cusp_spec(src, level, float(weight), sign, label=label)


def load_basis(path) -> list:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    head, rows = {}, []
    for i, ln in enumerate(lines, 1):
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("coeffs:"):
            try:
                rows.append([Fraction(t) for t in ln[7:].split()])
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad rational in {ln[:40]!r}", i) from exc
            continue
        key, sep, val = ln.partition("=")
        if not sep or key not in ("weight", "level", "dim"):
            raise ParseError(f"unexpected line {ln[:40]!r}", i)
        head[key] = int(val)
    for key in ("weight", "level", "dim"):
        if key not in head:
            raise ParseError(f"missing {key}=", None)
    if len(rows) != head["dim"]:
        raise ParseError(f"dim={head['dim']} but {len(rows)} coeffs: rows", None)
    return [QExpansion(head["weight"], head["level"], r) for r in rows]


def save_basis(basis: list, path) -> None:
    f0 = basis[0]
    out = [f"weight={f0.weight}", f"level={f0.level}", f"dim={len(basis)}"]
    for f in basis:
        out.append("coeffs: " + " ".join(str(c) for c in f.coeffs))
    Path(path).write_text("\n".join(out) + "\n")


def shipped_basis(level: int, weight: int = 2) -> list:
    name = f"basis_N{level}_k{weight}.txt"
    ref = resources.files("rhexplore") / "data" / name
    if not ref.is_file():
        raise DomainError(f"no shipped basis for level {level}, weight {weight}")
    with resources.as_file(ref) as p:
        return load_basis(p)
