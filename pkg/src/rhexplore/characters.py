"""Dirichlet characters and periodic coefficient casts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arithmetic import factorize, mult_fn
from .errors import ParseError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CoefficientCast:
    period: int
    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if self.period < 1 or len(vals) != self.period:
            raise ValueError("cast needs exactly `period` values")
        object.__setattr__(self, "values", vals)

    def __call__(self, n):
        return self.values[n % self.period]

    def array(self, N: int) -> np.ndarray:
        """a_1..a_N as a complex array."""
        vals = np.asarray(self.values, dtype=complex)
        return vals[np.arange(1, N + 1) % self.period]

    def conj(self) -> "CoefficientCast":
        return CoefficientCast(self.period, tuple(v.conjugate() for v in self.values))


def cast_from(values) -> CoefficientCast:
    vals = list(values)
    return CoefficientCast(len(vals), tuple(vals))


def is_character(cast: CoefficientCast, tol: float = 1e-12) -> tuple[bool, str | None]:
    """Check the character axioms; returns (ok, first violation)."""
    k = cast.period
    v = cast.values
    for n in range(k):
        coprime = math.gcd(n, k) == 1
        if coprime and abs(v[n]) < tol:
            return False, f"relative primality: chi({n}) = 0 with gcd({n},{k}) = 1"
        if not coprime and abs(v[n]) > tol:
            return False, f"relative primality: chi({n}) != 0 with gcd({n},{k}) > 1"
    if abs(v[1 % k] - 1) > tol:
        return False, "chi(1) != 1"
    for m in range(1, k + 1):
        for n in range(m, k + 1):
            if abs(v[(m * n) % k] - v[m % k] * v[n % k]) > tol:
                return False, f"multiplicativity fails at ({m},{n})"
    return True, None


@dataclass(frozen=True)
class CharacterTable:
    modulus: int
    rows: tuple
    labels: tuple
    generators: tuple = field(default=())

    @property
    def count(self):
        return len(self.rows)

    def __getitem__(self, label) -> CoefficientCast:
        return self.rows[self.index(label)]

    def index(self, label) -> int:
        j = _parse_label(label, self.modulus)
        for i, lab in enumerate(self.labels):
            if lab == (self.modulus, j):
                return i
        raise KeyError(f"no character {label!r} modulo {self.modulus}")


def _parse_label(label, k):
    if isinstance(label, int):
        return label
    if isinstance(label, tuple):
        if label[0] != k:
            raise KeyError(f"label {label} is not modulo {k}")
        return label[1]
    text = str(label).strip()
    if text == "principal":
        return 1
    text = text.strip("()").replace(" ", "")
    kk, j = (int(t) for t in text.split(","))
    if kk != k:
        raise KeyError(f"label {label} is not modulo {k}")
    return j


def _primitive_root(p):
    phi = p - 1
    qs = [q for q, _ in factorize(phi)] if phi > 1 else []
    for g in range(2, p + 1) if p > 2 else [1]:
        if all(pow(g, phi // q, p) != 1 for q in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")


def _unit_components(k):
    """Cyclic decomposition [(modulus, generator, order), ...] of (Z/k)^x.

    A cyclic unit group uses the least primitive root mod k.  Otherwise
    each odd prime power p^a uses the least primitive root mod p, lifted
    to p^a when needed, and 2^e (e >= 3) splits as <-1> x <5>.
    """
    phi = mult_fn("totient", k)
    if k > 2:
        qs = [q for q, _ in factorize(phi)]
        for g in range(2, k):
            if math.gcd(g, k) == 1 and all(pow(g, phi // q, k) != 1 for q in qs):
                return [(k, g, phi)]
    comps = []
    for p, a in factorize(k) if k > 1 else []:
        q = p ** a
        if p == 2:
            if a == 2:
                comps.append((q, 3, 2))
            elif a >= 3:
                comps.append((q, q - 1, 2))
                comps.append((q, 5, q // 4))
        else:
            g = _primitive_root(p)
            if a > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            comps.append((q, g, q // p * (p - 1)))
    return comps


def enumerate_characters(k: int) -> CharacterTable:
    """All phi(k) characters modulo k.

    Component generators follow _unit_components.  Row j (1-based) has
    chi_j(g_i) = exp(-2 pi i e_i / o_i) where (e_1, e_2, ...) is the
    mixed-radix expansion of j - 1 with the first component most
    significant.  For cyclic unit groups this gives chi_j(g) =
    exp(-2 pi i (j-1)/phi(k)) with g the least primitive root, which
    reproduces the labels printed for moduli 4, 5, 6 and 10 (see
    PINNED_CASTS); 61 and 666 follow the same rule.
    """
    if k < 1:
        raise ValueError("modulus must be >= 1")
    comps = _unit_components(k)
    # discrete log of each residue in every component
    logs = []
    for q, g, order in comps:
        table = {}
        x = 1
        for e in range(order):
            table[x] = e
            x = x * g % q
        logs.append(table)

    def dlog(i, n):
        q, g, _ = comps[i]
        r = n % q
        if q % 8 == 0 and g == q - 1:       # the <-1> factor of 2^e
            return 0 if r % 4 == 1 else 1
        if q % 8 == 0 and g == 5:           # the <5> factor: strip the sign
            return logs[i][r if r % 4 == 1 else (q - r) % q]
        return logs[i][r]
    orders = [o for _, _, o in comps]
    total = math.prod(orders) if orders else 1
    rows, labels = [], []
    for j in range(total):
        exps, rem = [], j
        for o in reversed(orders):
            exps.append(rem % o)
            rem //= o
        exps.reverse()
        vals = []
        for n in range(k):
            if math.gcd(n, k) != 1:
                vals.append(0j)
                continue
            ph = 0.0
            for i, ((q, _, o), e) in enumerate(zip(comps, exps)):
                ph += e * dlog(i, n) / o
            vals.append(_root_of_unity(-ph))
        if k == 1:
            vals = [1 + 0j]
        rows.append(CoefficientCast(k, tuple(vals)))
        labels.append((k, j + 1))
    return CharacterTable(k, tuple(rows), tuple(labels), tuple((q, g) for q, g, _ in comps))


def _root_of_unity(frac):
    frac = frac % 1.0
    # exact values at quarter turns keep printed casts exact
    for num, val in ((0.0, 1), (0.25, 1j), (0.5, -1), (0.75, -1j), (1.0, 1)):
        if abs(frac - num) < 1e-15:
            return complex(val)
    return complex(math.cos(2 * math.pi * frac), math.sin(2 * math.pi * frac))


def char_value(table: CharacterTable, label, n: int) -> complex:
    return table[label](n)


def dirichlet_character(k: int, j: int) -> CoefficientCast:
    return enumerate_characters(k)[(k, j)]


# Casts printed with explicit labels; used to validate the labelling rule.
PINNED_CASTS = {
    (4, 2): (0, 1, 0, -1),
    (5, 2): (0, 1, -1j, 1j, -1),
    (5, 3): (0, 1, -1, -1, 1),
    (5, 4): (0, 1, 1j, -1j, -1),
    (6, 2): (0, 1, 0, 0, 0, -1),
    (10, 2): (0, 1, 0, -1j, 0, 0, 0, 1j, 0, -1),
    (10, 4): (0, 1, 0, 1j, 0, 0, 0, -1j, 0, -1),
}


def is_principal(cast: CoefficientCast) -> bool:
    k = cast.period
    return all(abs(cast.values[n] - (1 if math.gcd(n, k) == 1 else 0)) < 1e-12 for n in range(k))


def parity(cast: CoefficientCast) -> int:
    """0 for even characters, 1 for odd ones."""
    return 0 if abs(cast(-1) - 1) < 1e-9 else 1


def conductor_of(cast: CoefficientCast) -> int:
    """Conductor of a true character: least divisor d with chi periodic mod d on units."""
    k = cast.period
    for d in sorted(x for x in range(1, k + 1) if k % x == 0):
        ok = True
        for n in range(1, k):
            if math.gcd(n, k) != 1:
                continue
            m = n % d
            # compare with any unit congruent to n mod d
            for r in range(1, k):
                if math.gcd(r, k) == 1 and r % d == m and abs(cast(r) - cast(n)) > 1e-9:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return d
    return k


def primitive_of(cast: CoefficientCast) -> CoefficientCast:
    """The primitive character inducing a true character."""
    k = cast.period
    d = conductor_of(cast)
    vals = []
    for m in range(d):
        if math.gcd(m, d) != 1:
            vals.append(0j)
            continue
        n = next(n for n in range(m if m else d, k * d + 1, d) if math.gcd(n, k) == 1)
        vals.append(cast(n))
    if d == 1:
        vals = [1 + 0j]
    return CoefficientCast(d, tuple(vals))


def gauss_sum(cast: CoefficientCast) -> complex:
    k = cast.period
    n = np.arange(k)
    return complex(np.sum(np.asarray(cast.values) * np.exp(2j * np.pi * n / k)))


def builtin_cast(kind: str, N: int, seed: int | None = None, step: int = 3,
                 signs=(1, -1)) -> np.ndarray:
    """Named coefficient sequences a_1..a_N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1)
    if kind == "random101":
        rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))
        return rng.integers(-1, 2, size=N).astype(complex)
    if kind == "morse_thue":
        out = np.zeros(N, dtype=complex)
        odd = n % 2 == 1
        m = (n[odd] - 1) // 2
        parity_bits = np.array([bin(int(v)).count("1") & 1 for v in m])
        out[odd] = np.where(parity_bits == 1, -1.0, 1.0)
        return out
    if kind == "golden_angle":
        return np.exp(2j * np.pi * GOLDEN * n)
    if kind == "arithmetic_progression":
        pattern = arithmetic_progression_pattern(step, signs)
        return np.asarray(pattern, dtype=complex)[(n - 1) % len(pattern)]
    raise ValueError(f"unknown builtin cast {kind!r}")


def arithmetic_progression_pattern(step: int, signs) -> list:
    """Period step*len(signs) pattern: signs placed at n = 1, 1+step, ..."""
    pattern = [0] * (step * len(signs))
    for i, s in enumerate(signs):
        pattern[i * step] = s
    return pattern


def mobius_cast_values(N: int) -> np.ndarray:
    return np.array([mult_fn("mobius", int(v)) for v in range(1, N + 1)], dtype=complex)


def save_cast(cast: CoefficientCast, path) -> None:
    lines = [f"period={cast.period}"]
    lines += [f"{v.real!r} {v.imag!r}" for v in cast.values]
    Path(path).write_text("\n".join(lines) + "\n")


def load_cast(path) -> CoefficientCast:
    lines = Path(path).read_text().splitlines()
    period = None
    values = []
    for i, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("period="):
            try:
                period = int(line.split("=", 1)[1])
            except ValueError as exc:
                raise ParseError("bad period", i) from exc
            continue
        parts = line.split()
        if len(parts) not in (1, 2):
            raise ParseError("expected 're im'", i)
        try:
            values.append(complex(float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0))
        except ValueError as exc:
            raise ParseError("non-numeric value", i) from exc
    if period is None:
        raise ParseError("missing period= header", 1)
    if len(values) != period:
        raise ParseError(f"expected {period} values, found {len(values)}", len(lines))
    return CoefficientCast(period, tuple(values))
