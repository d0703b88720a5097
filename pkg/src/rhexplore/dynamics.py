"""Parameterized Dirichlet-series families, zero trajectories and coefficient paths."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import kernels
from .characters import CoefficientCast
from .errors import DomainError, IllConditionedError, ParseError
from .lfunctions import PeriodicDirichlet, ZetaFunction, cusp_spec
from .series import ListSource, MultiplicativeSource, SeriesFunction, default_terms, log_n
from .zeros import ScanConfig, Zero, ZeroClass, classify, scan_zeros

LN2 = math.log(2.0)


class FamilyKind(enum.Enum):
    eta_rotation = "eta_rotation"
    base_semicircle = "base_semicircle"
    char_rotation_10 = "char_rotation_10"
    char_rotation_5 = "char_rotation_5"
    prime_rotation = "prime_rotation"
    modular_combination = "modular_combination"
    curve_interpolation = "curve_interpolation"


@dataclass
class FamilySpec:
    """A one-parameter family; `data` holds kind-specific inputs.

    data keys: terms (naked truncation for periodic kinds, None = exact
    continuation), phi ("rotation" or "linear") for prime_rotation, basis
    (four expansions) for modular_combination, curves/cond for
    curve_interpolation.
    """
    kind: FamilyKind
    thetas: np.ndarray
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = FamilyKind(self.kind)
        self.thetas = np.asarray(self.thetas, dtype=float)
        if self.thetas.size > 1 and np.any(np.diff(self.thetas) <= 0):
            raise DomainError("theta grid must be strictly increasing")


# ---------------------------------------------------------------------------
# Family members

class EtaRotation:
    """(1 - (1 + e^{i theta}) 2^{-z}) zeta(z)."""

    def __init__(self, theta):
        self.c = 1 + np.exp(1j * theta)
        self.zeta = ZetaFunction()

    def factor(self, z):
        return 1 - self.c * np.exp(-np.asarray(z, dtype=complex) * LN2)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.factor(z) * self.zeta(z)

    def on_line(self, x, y0, dy, ny):
        z = x + 1j * (y0 + dy * np.arange(ny))
        return self.factor(z) * self.zeta.on_line(x, y0, dy, ny)


class BaseSeries:
    """sum_n c_n b_n^{-z} with real or complex bases b_n (principal logarithm)."""

    def __init__(self, coeffs, bases):
        self.c = np.asarray(coeffs, dtype=complex)
        self.logb = np.log(np.asarray(bases, dtype=complex))

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        s = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        out = kernels.dirichlet_points(self.c, self.logb, s)
        return complex(out[0]) if scalar else out.reshape(np.shape(z))

    def on_line(self, x, y0, dy, ny):
        return kernels.dirichlet_line(self.c, self.logb, x, y0, dy, ny)


def semicircle_bases(theta: float, pairs: int):
    """Bases 1, b(0), 7, b(1), ... for the loop 6n+5 -> 6n+4 -> around back to 6n+5.

    theta in [0, 1] runs down the real axis, theta in [1, 2] runs anticlockwise
    around 6n + (9 + e^{i phi})/2 with phi = pi (1 + (theta - 1)).
    """
    n = np.arange(pairs)
    if theta <= 1:
        moving = 6 * n + 5 - theta
    else:
        phi = math.pi * theta
        moving = 6 * n + 0.5 * (9 + np.exp(1j * phi))
    bases = np.empty(2 * pairs, dtype=complex)
    bases[0::2] = 6 * n + 1
    bases[1::2] = moving
    coeffs = np.tile([1.0, -1.0], pairs)
    return coeffs, bases


def char10_cast(theta: float) -> CoefficientCast:
    e = np.exp(1j * theta)
    return CoefficientCast(10, [0, 1, 0, e, 0, 0, 0, -e, 0, -1])


def char5_cast(theta: float) -> CoefficientCast:
    return CoefficientCast(5, [0, 1, np.exp(1j * theta), np.exp(3j * theta), np.exp(2j * theta)])


def _phi(theta, mode):
    return np.exp(1j * theta) if mode == "rotation" else complex(theta)


@lru_cache(maxsize=64)
def _prime_rotation_source(theta: float, mode: str) -> MultiplicativeSource:
    base = [0, 1, 0, _phi(theta, mode), 0, 0, 0, -_phi(theta, mode), 0, -1]
    return MultiplicativeSource(lambda p: base[p % 10])


class _Shifted:
    def __init__(self, f, shift):
        self.f = f
        self.shift = shift

    def __call__(self, z):
        return self.f(np.asarray(z, dtype=complex) + self.shift)


def _naked(cast: CoefficientCast, terms):
    src = ListSource(cast.array(terms))
    return SeriesFunction(src, terms=lambda t: terms)


def family_series(spec: FamilySpec, theta: float):
    kind, d = spec.kind, spec.data
    terms = d.get("terms")
    if kind is FamilyKind.eta_rotation:
        return EtaRotation(theta)
    if kind is FamilyKind.base_semicircle:
        if not 0 <= theta <= 2:
            raise DomainError("base_semicircle theta runs over [0, 2]")
        pairs = (terms or 4000) // 2
        return BaseSeries(*semicircle_bases(theta, pairs))
    if kind in (FamilyKind.char_rotation_10, FamilyKind.char_rotation_5):
        cast = char10_cast(theta) if kind is FamilyKind.char_rotation_10 else char5_cast(theta)
        return _naked(cast, terms) if terms else PeriodicDirichlet(cast)
    if kind is FamilyKind.prime_rotation:
        src = _prime_rotation_source(float(theta), d.get("phi", "rotation"))
        if terms:
            return SeriesFunction(src, terms=lambda t: terms)
        return SeriesFunction(src)
    if kind is FamilyKind.modular_combination:
        from .modular import modular_family_coeffs
        a = modular_family_coeffs(d["basis"], theta)
        spec_l = cusp_spec(ListSource(a), d.get("level", 38), 2.0, 1.0, label=f"m(theta={theta})")
        # normalized so the critical line is Re z = 1/2
        return _Shifted(spec_l, 0.5)
    if kind is FamilyKind.curve_interpolation:
        from .elliptic import interp_curves
        N = terms or 4000
        a = interp_curves(d["curves"][0], d["curves"][1], theta, N, d.get("cond"))
        n = np.arange(1, N + 1)
        return SeriesFunction(ListSource(a / np.sqrt(n)), terms=lambda t: N)
    raise DomainError(f"unknown family kind {kind}")


def predicted_factor_zeros(theta: float, k_range=range(-3, 4)) -> list[complex]:
    """Zeros of 1 - (1 + e^{i theta}) 2^{-z}: log(1 + e^{i theta})/ln 2 + 2 pi i k / ln 2."""
    c = 1 + np.exp(1j * theta)
    if abs(c) < 1e-14:
        raise DomainError("the factor degenerates at theta = pi")
    z0 = np.log(c) / LN2
    return [complex(z0 + 2j * math.pi * k / LN2) for k in k_range]


# ---------------------------------------------------------------------------
# Trajectories

@dataclass
class ZeroTrajectory:
    id: int
    samples: list = field(default_factory=list)
    lost_at: float | None = None

    @property
    def last(self) -> complex:
        return self.samples[-1][1]

    @property
    def thetas(self):
        return [s[0] for s in self.samples]


def _match(prev: list[complex], new: list[complex], jump: float):
    """Greedy nearest-neighbour matching by increasing distance."""
    if not prev or not new:
        return {}
    P = np.array(prev)
    Q = np.array(new)
    D = np.abs(P[:, None] - Q[None, :])
    pairs = np.argwhere(D < jump)
    order = np.argsort(D[pairs[:, 0], pairs[:, 1]], kind="stable")
    used_p, used_q, out = set(), set(), {}
    for i, j in pairs[order]:
        if i in used_p or j in used_q:
            continue
        used_p.add(i)
        used_q.add(j)
        out[int(i)] = int(j)
    return out


def sweep(spec: FamilySpec, scan_cfg: ScanConfig, jump: float = 0.3) -> list[ZeroTrajectory]:
    trajs: list[ZeroTrajectory] = []
    active: list[ZeroTrajectory] = []
    for theta in spec.thetas:
        f = family_series(spec, float(theta))
        zs = scan_zeros(f, scan_cfg)
        new = [z.location for z in zs]
        cls = [z.zclass for z in zs]
        m = _match([t.last for t in active], new, jump)
        lost = [k for k in range(len(active)) if k not in m]
        taken = set(m.values())
        for k in lost:
            # one local re-scan at doubled resolution around the lost zero
            z0 = active[k].last
            local = ScanConfig((z0.real - jump, z0.real + jump), (z0.imag - jump, z0.imag + jump),
                               scan_cfg.x_step / 2, scan_cfg.y_step / 2, scan_cfg.newton_tol,
                               scan_cfg.newton_h, scan_cfg.max_newton_iters, scan_cfg.dedupe_radius)
            found = [z for z in scan_zeros(f, local) if abs(z.location - z0) < jump]
            found = [z for z in found if all(abs(z.location - new[j]) > scan_cfg.dedupe_radius for j in taken)]
            if found:
                best = min(found, key=lambda z: abs(z.location - z0))
                new.append(best.location)
                cls.append(best.zclass)
                m[k] = len(new) - 1
                taken.add(len(new) - 1)
        still = []
        for k, t in enumerate(active):
            if k in m:
                j = m[k]
                t.samples.append((float(theta), complex(new[j]), cls[j]))
                still.append(t)
            else:
                t.lost_at = float(theta)
        for j in range(len(new)):
            if j not in taken:
                t = ZeroTrajectory(len(trajs), [(float(theta), complex(new[j]), cls[j])])
                trajs.append(t)
                still.append(t)
        active = still
    return trajs


@dataclass
class BraidSummary:
    permutation: dict
    exchanges: int
    unmatched: int


def braid_summary(trajectories: list[ZeroTrajectory], theta_period: float, tol: float = 1e-9) -> BraidSummary:
    """Map start-of-loop zeros to end-of-loop zeros (indices ordered by Im, Re)."""
    thetas = sorted({s[0] for t in trajectories for s in t.samples})
    if not thetas:
        return BraidSummary({}, 0, 0)
    t0, t1 = thetas[0], thetas[-1]
    if abs((t1 - t0) - theta_period) > 1e-6 * max(1.0, abs(theta_period)) and len(thetas) > 1:
        raise DomainError("parameter path is not a closed loop")
    start = [(s[1], t.id) for t in trajectories for s in t.samples if abs(s[0] - t0) < tol]
    end = [(s[1], t.id) for t in trajectories for s in t.samples if abs(s[0] - t1) < tol]
    key = lambda p: (round(p[0].imag, 6), round(p[0].real, 6))
    start.sort(key=key)
    end.sort(key=key)
    end_index = {tid: i for i, (_, tid) in enumerate(end)}
    perm, unmatched = {}, 0
    for i, (_, tid) in enumerate(start):
        if tid in end_index:
            perm[i] = end_index[tid]
        else:
            unmatched += 1
    exchanges = 0
    for t in trajectories:
        anchor = None
        for _, _, c in t.samples:
            if c in (ZeroClass.critical, ZeroClass.gollum):
                if anchor is not None and c is not anchor:
                    exchanges += 1
                anchor = c
    return BraidSummary(perm, exchanges, unmatched)


def save_trajectories(trajs: list[ZeroTrajectory], path) -> None:
    """CSV to a path or an open text stream."""
    if hasattr(path, "write"):
        _write_trajectories(trajs, path)
        return
    with open(path, "w", newline="") as fh:
        _write_trajectories(trajs, fh)


def _write_trajectories(trajs, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["traj_id", "theta", "re", "im", "class"])
    for t in trajs:
        for th, z, c in t.samples:
            w.writerow([t.id, repr(th), repr(z.real), repr(z.imag), c.value])


def load_trajectories(path) -> list[ZeroTrajectory]:
    by_id: dict = {}
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["traj_id", "theta", "re", "im", "class"]:
        raise ParseError("missing trajectory header traj_id,theta,re,im,class", 1)
    for i, r in enumerate(rows[1:], 2):
        try:
            tid = int(r[0])
            sample = (float(r[1]), complex(float(r[2]), float(r[3])), ZeroClass(r[4]))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad trajectory row {r}", i) from exc
        by_id.setdefault(tid, ZeroTrajectory(tid)).samples.append(sample)
    return [by_id[k] for k in sorted(by_id)]


# ---------------------------------------------------------------------------
# Coefficient paths through prescribed zeros

@dataclass
class CoeffPath:
    coeffs: np.ndarray
    condition: float
    residuals: np.ndarray
    zeros: np.ndarray


def _as_points(zs):
    out = []
    for z in zs:
        if isinstance(z, Zero):
            out.append(z.location)
        elif np.iscomplexobj(z) or isinstance(z, complex):
            out.append(complex(z))
        else:
            out.append(complex(0.5, float(z)))
    return np.array(out, dtype=complex)


def solve_coeff_path(zeros_A, zeros_B, theta: float, N: int, max_condition: float = 1e12) -> CoeffPath:
    """Coefficients a_1..a_N vanishing at N-1 interpolated zeros with sum a_n = 1, then a_1 = 1."""
    if N < 2:
        raise DomainError("N must be >= 2")
    A_pts, B_pts = _as_points(zeros_A), _as_points(zeros_B)
    if A_pts.size < N - 1 or B_pts.size < N - 1:
        raise DomainError(f"need {N - 1} zeros from each endpoint")
    rho = (1 - theta) * A_pts[:N - 1] + theta * B_pts[:N - 1]
    L = log_n(N)
    M = np.vstack([np.exp(-np.outer(rho, L)), np.ones(N)])
    b = np.zeros(N, dtype=complex)
    b[-1] = 1
    lu, piv = sla.lu_factor(M)
    x = sla.lu_solve((lu, piv), b)
    x = x + sla.lu_solve((lu, piv), b - M @ x)
    anorm = np.abs(M).sum(axis=0).max()
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    cond = math.inf if rcond == 0 else 1.0 / rcond
    if cond > max_condition:
        raise IllConditionedError(f"condition estimate {cond:.3g} exceeds {max_condition:.3g}", cond)
    if x[0] == 0:
        raise IllConditionedError("a_1 vanishes; cannot normalize", cond)
    a = x / x[0]
    res = np.abs(np.exp(-np.outer(rho, L)) @ a)
    return CoeffPath(a, cond, res, rho)
