"""Zero location by line scans and Newton, classification and zero statistics."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erf

from .errors import DomainError, ParseError, PoleError
from .lfunctions import zeta


class ZeroClass(enum.Enum):
    critical = "critical"
    axis_periodic = "axis_periodic"
    off_critical = "off_critical"
    gollum = "gollum"


TAU_C = 0.01
TAU_A = 0.01


@dataclass
class Zero:
    location: complex
    residual: float
    zclass: ZeroClass
    series_terms_used: int = 0
    multiple: bool = False

    @property
    def re(self):
        return self.location.real

    @property
    def im(self):
        return self.location.imag


@dataclass(frozen=True)
class ScanConfig:
    x_range: tuple = (0.0, 1.0)
    y_range: tuple = (10.0, 60.0)
    x_step: float = 0.05
    y_step: float = 0.02
    newton_tol: float = 1e-9
    newton_h: float = 1e-7
    max_newton_iters: int = 40
    dedupe_radius: float = 1e-4
    seed_filter: bool = True

    def __post_init__(self):
        if self.x_step <= 0 or self.y_step <= 0:
            raise DomainError("scan steps must be positive")
        if self.newton_tol <= 0 or self.newton_h <= 0 or self.dedupe_radius <= 0:
            raise DomainError("tolerances must be positive")
        if self.x_range[1] < self.x_range[0] or self.y_range[1] <= self.y_range[0]:
            raise DomainError("empty scan window")
        if self.max_newton_iters < 1:
            raise DomainError("max_newton_iters must be >= 1")


class ZeroList(list):
    """Scan result; `dropped` counts seeds that failed to converge in the window."""
    dropped: int = 0


class Derivative:
    """f' by the four-point complex stencil (error O(h^4))."""

    def __init__(self, f, h: float = 1e-3):
        self.f = f
        self.h = h

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        f, h = self.f, self.h
        return (f(z + h) - f(z - h) - 1j * (f(z + 1j * h) - f(z - 1j * h))) / (4 * h)

    def on_line(self, x, y0, dy, ny):
        # seeding only: five-point stencil along the line, f' = -i df/dy
        v = _on_line(self.f, x, y0 - 2 * dy, dy, ny + 4)
        d = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * dy)
        return -1j * d


def _on_line(f, x, y0, dy, ny):
    try:
        if hasattr(f, "on_line"):
            return np.asarray(f.on_line(x, y0, dy, ny), dtype=complex)
        return np.asarray(f(x + 1j * (y0 + dy * np.arange(ny))), dtype=complex)
    except PoleError:
        return _pointwise(f, x + 1j * (y0 + dy * np.arange(ny)))


def _eval(f, z):
    z = np.asarray(z, dtype=complex)
    try:
        return np.asarray(f(z), dtype=complex)
    except PoleError:
        return _pointwise(f, z)


def _pointwise(f, z):
    # a pole inside a batch: evaluate one point at a time, poles become inf
    flat = np.atleast_1d(z).ravel()
    out = np.empty(flat.size, dtype=complex)
    for i, w in enumerate(flat):
        try:
            out[i] = complex(np.asarray(f(np.array([w])))[0])
        except PoleError:
            out[i] = complex(np.inf, 0.0)
    return out.reshape(np.shape(z))


def classify(z, tau_c: float = TAU_C, tau_a: float = TAU_A) -> ZeroClass:
    x = complex(z.location if isinstance(z, Zero) else z).real
    if abs(x - 0.5) < tau_c:
        return ZeroClass.critical
    if abs(x) < tau_a:
        return ZeroClass.axis_periodic
    if x < -tau_a:
        return ZeroClass.gollum
    return ZeroClass.off_critical


def _seeds(f, cfg: ScanConfig) -> np.ndarray:
    x0, x1 = cfg.x_range
    y0, y1 = cfg.y_range
    nx = int(math.floor((x1 - x0) / cfg.x_step + 1e-9)) + 1
    xs = x0 + cfg.x_step * np.arange(nx)
    ny = int(math.floor((y1 - y0) / cfg.y_step + 1e-9)) + 1
    ys = y0 + cfg.y_step * np.arange(ny)
    grid = np.empty((nx, ny))
    for j, x in enumerate(xs):
        grid[j] = np.abs(_on_line(f, x, y0, cfg.y_step, ny))
    grid[~np.isfinite(grid)] = np.inf
    # local minima along each vertical line
    m = np.zeros_like(grid, dtype=bool)
    m[:, 1:-1] = (grid[:, 1:-1] < grid[:, :-2]) & (grid[:, 1:-1] <= grid[:, 2:])
    if cfg.seed_filter and nx > 1:
        # keep line minima that are also no larger than the neighbouring lines
        left = np.vstack([np.full((1, ny), np.inf), grid[:-1]])
        right = np.vstack([grid[1:], np.full((1, ny), np.inf)])
        m &= (grid <= left) & (grid <= right)
    jj, ii = np.nonzero(m)
    return xs[jj] + 1j * ys[ii]


def newton_refine(f, z, cfg: ScanConfig, pad: float = 1.0):
    """Vectorized secant-Newton z <- z - f(z) h / (f(z+h) - f(z)).

    Iterates leaving the scan window padded by `pad` are stopped and reported
    with an infinite residual, so a runaway step never reaches huge heights.
    """
    z = np.array(z, dtype=complex)
    active = np.ones(z.size, dtype=bool)
    lost = np.zeros(z.size, dtype=bool)
    (x0, x1), (y0, y1) = cfg.x_range, cfg.y_range
    for _ in range(cfg.max_newton_iters):
        if not active.any():
            break
        za = z[active]
        h = cfg.newton_h * (1 + np.abs(za))
        both = _eval(f, np.concatenate([za, za + h]))
        fz, fh = both[:za.size], both[za.size:]
        with np.errstate(all="ignore"):
            step = fz * h / (fh - fz)
        bad = ~np.isfinite(step)
        step[bad] = 0
        za = za - step
        z[active] = za
        out = ((za.real < x0 - pad) | (za.real > x1 + pad) | (za.imag < y0 - pad)
               | (za.imag > y1 + pad))
        done = (np.abs(step) < 1e-13 * (1 + np.abs(za))) | bad | out
        idx = np.flatnonzero(active)
        lost[idx[out | bad]] = True
        active[idx[done]] = False
    res = np.full(z.size, np.inf)
    keep = ~lost
    if keep.any():
        res[keep] = np.abs(_eval(f, z[keep]))
    return z, res


def scan_zeros(f, cfg: ScanConfig | None = None) -> ZeroList:
    cfg = cfg or ScanConfig()
    seeds = _seeds(f, cfg)
    z, res = newton_refine(f, seeds, cfg)
    x0, x1 = cfg.x_range
    y0, y1 = cfg.y_range
    eps = 1e-9
    ok = (np.isfinite(res) & (res < cfg.newton_tol) & (z.real >= x0 - eps) & (z.real <= x1 + eps)
          & (z.imag >= y0 - eps) & (z.imag <= y1 + eps))
    out = ZeroList()
    out.dropped = int((~ok).sum())
    z, res = z[ok], res[ok]
    order = np.argsort(z.imag, kind="stable")
    z, res = z[order], res[order]
    kept: list[int] = []
    for i in range(z.size):
        dup = None
        for j in reversed(kept):
            if z[i].imag - z[j].imag > cfg.dedupe_radius:
                break
            if abs(z[i] - z[j]) < cfg.dedupe_radius:
                dup = j
                break
        if dup is None:
            kept.append(i)
        elif res[i] < res[dup]:
            kept[kept.index(dup)] = i
    if not kept:
        return out
    zk = z[kept]
    h = 1e-5 * (1 + np.abs(zk))
    slope = np.abs(_eval(f, zk + h) - _eval(f, zk)) / h
    terms = getattr(f, "terms_used", None)
    for zi, ri, si in zip(zk, res[kept], slope):
        out.append(Zero(complex(zi), float(ri), classify(zi),
                        int(terms(zi)) if terms else 0,
                        multiple=bool(si < 10 * math.sqrt(cfg.newton_tol))))
    return out


def mean_real(zeros, exclude=(ZeroClass.gollum, ZeroClass.axis_periodic)) -> float:
    """Mean real part over non-real zeros, skipping the axis and gollum classes."""
    xs = [z.re for z in zeros if z.zclass not in exclude and abs(z.im) > 1e-9]
    if not xs:
        raise DomainError("no zeros to average")
    return float(np.mean(xs))


# ---------------------------------------------------------------------------
# Counting

def riemann_count_main(T: float, include_constant: bool = True) -> float:
    """(T/2pi) log(T/2pi) - T/2pi + 7/8; the 7/8 can be dropped for the bare main term."""
    if T <= 2 * math.pi:
        raise DomainError("T must exceed 2 pi")
    u = T / (2 * math.pi)
    return u * math.log(u) - u + (0.875 if include_constant else 0.0)


def s_of_T(T: float, steps: int = 4000) -> float:
    """(1/pi) arg zeta(1/2 + iT) tracked continuously along 2 -> 2+iT -> 1/2+iT."""
    if T <= 2 * math.pi:
        raise DomainError("T must exceed 2 pi")
    for shift in (0.0, 2e-6, -2e-6, 5e-6):
        TT = T + shift
        xs = np.linspace(2.0, 0.5, steps + 1)
        vals = zeta(xs + 1j * TT)
        if np.min(np.abs(vals)) > 1e-6:
            break
    else:
        raise DomainError("path passes through a zero")
    ph = np.angle(vals)
    d = np.diff(ph)
    if np.max(np.abs((d + np.pi) % (2 * np.pi) - np.pi)) > np.pi / 4:
        return s_of_T(T, steps * 4)
    # Re zeta > 0 on Re z = 2, so the principal argument is continuous up the line
    total = ph[0] + np.sum((d + np.pi) % (2 * np.pi) - np.pi)
    return float(total / np.pi)


# ---------------------------------------------------------------------------
# Spacing statistics

def _density(T, conductor=1):
    return np.log(conductor * np.asarray(T) / (2 * np.pi)) / (2 * np.pi)


def _unfold(ordinates, conductor=1):
    T = np.asarray(ordinates, dtype=float)
    u = T / (2 * np.pi)
    return u * np.log(conductor * u) - u


def gue_density(s):
    s = np.asarray(s, dtype=float)
    return (32 / np.pi ** 2) * s ** 2 * np.exp(-4 * s ** 2 / np.pi)


def gue_cdf(s):
    s = np.asarray(s, dtype=float)
    return erf(2 * s / np.sqrt(np.pi)) - (4 * s / np.pi) * np.exp(-4 * s ** 2 / np.pi)


@dataclass
class SpacingStats:
    spacings: np.ndarray
    counts: np.ndarray
    edges: np.ndarray
    density: np.ndarray
    gue: np.ndarray
    ks_gue: float
    ks_poisson: float
    ks_critical: float

    @property
    def mean(self):
        return float(np.mean(self.spacings))

    @property
    def gue_rejected(self):
        return self.ks_gue > self.ks_critical


def _ordinates(zeros):
    ys = np.array([z.im if isinstance(z, Zero) else float(np.imag(z)) if np.iscomplexobj(z) else float(z)
                   for z in zeros])
    ys = np.sort(ys[ys > 0])
    return ys


def spacing_stats(zeros, conductor: int = 1, bins: int = 40, s_max: float = 4.0) -> SpacingStats:
    """Consecutive gaps times the local density d/dT of the count main term."""
    ys = _ordinates(zeros)
    if ys.size < 50:
        raise DomainError("spacing statistics need at least 50 zeros")
    gaps = np.diff(ys)
    s = gaps * _density(0.5 * (ys[1:] + ys[:-1]), conductor)
    counts, edges = np.histogram(s, bins=bins, range=(0, s_max))
    width = edges[1] - edges[0]
    dens = counts / (s.size * width)
    mids = 0.5 * (edges[1:] + edges[:-1])
    srt = np.sort(s)
    n = srt.size
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    F = gue_cdf(srt)
    ks = float(max(np.max(np.abs(hi - F)), np.max(np.abs(lo - F))))
    P = 1 - np.exp(-srt)
    ksp = float(max(np.max(np.abs(hi - P)), np.max(np.abs(lo - P))))
    return SpacingStats(s, counts, edges, dens, gue_density(mids), ks, ksp, 1.36 / math.sqrt(n))


@dataclass
class PairCorrelation:
    centers: np.ndarray
    counts: np.ndarray
    r2: np.ndarray
    reference: np.ndarray
    n: int
    width: float


def pair_correlation(zeros, max_gap: float = 3.0, bins: int = 60, conductor: int = 1) -> PairCorrelation:
    """Normalized pair counts per unfolded gap bin against 1 - (sin pi x / pi x)^2."""
    ys = _ordinates(zeros)
    if ys.size < 100:
        raise DomainError("pair correlation needs at least 100 zeros")
    u = _unfold(ys, conductor)
    diffs = []
    for i in range(u.size):
        j = np.searchsorted(u, u[i] + max_gap, side="right")
        diffs.append(u[i + 1:j] - u[i])
    d = np.concatenate(diffs) if diffs else np.zeros(0)
    counts, edges = np.histogram(d, bins=bins, range=(0, max_gap))
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[1:] + edges[:-1])
    r2 = counts / (u.size * width)
    ref = 1 - np.sinc(centers) ** 2
    return PairCorrelation(centers, counts, r2, ref, int(u.size), float(width))


# ---------------------------------------------------------------------------
# Unit level curve |zeta - 1| = 1

@dataclass
class LevelCurve:
    ys: np.ndarray
    xs: np.ndarray
    skipped: int
    geometric_mean: float
    positive_geometric_mean: float


def unit_level_curve(y_range=(20.0, 120.0), step: float = 0.01, x_range=(-1.0, 3.0),
                     dx: float = 0.01, f=None) -> LevelCurve:
    """Rightmost x with |zeta(x+iy) - 1| = 1 at each y, by grid bracketing and bisection."""
    from .lfunctions import ZetaFunction
    f = f or ZetaFunction()
    y0, y1 = y_range
    ny = int(math.floor((y1 - y0) / step + 1e-9)) + 1
    ys = y0 + step * np.arange(ny)
    xs = np.arange(x_range[0], x_range[1] + dx / 2, dx)
    g = np.empty((xs.size, ny))
    for j, x in enumerate(xs):
        g[j] = np.abs(_on_line(f, x, y0, step, ny) - 1) - 1
    # rightmost sign change from >= 0 (left) to < 0 (right)
    lo = np.full(ny, np.nan)
    for j in range(xs.size - 1):
        cross = (g[j] >= 0) & (g[j + 1] < 0)
        lo[cross] = xs[j]
    ok = ~np.isnan(lo)
    a, b = lo[ok], lo[ok] + dx
    yy = ys[ok]
    for _ in range(40):
        mid = 0.5 * (a + b)
        gm = np.abs(_eval(f, mid + 1j * yy) - 1) - 1
        right = gm >= 0
        a = np.where(right, mid, a)
        b = np.where(right, b, mid)
    x = 0.5 * (a + b)
    # a few heights have p(y) < 0; they enter the geometric mean through |p|
    gmean = float(np.exp(np.mean(np.log(np.abs(x))))) if x.size else float("nan")
    pos = x > 0
    gpos = float(np.exp(np.mean(np.log(x[pos])))) if pos.any() else float("nan")
    return LevelCurve(yy, x, int((~ok).sum()), gmean, gpos)


def level_mean_root(y_range=(20.0, 120.0), step: float = 0.01, bracket=(0.3, 0.9)) -> float:
    """Root in x of 1 - geometric mean over y of |zeta(x+iy) - 1|."""
    from scipy.optimize import brentq

    from .lfunctions import ZetaFunction
    f = ZetaFunction()
    y0, y1 = y_range
    ny = int(math.floor((y1 - y0) / step + 1e-9)) + 1

    def g(x):
        v = np.abs(_on_line(f, x, y0, step, ny) - 1)
        return 1 - float(np.exp(np.mean(np.log(v))))

    return brentq(g, *bracket, xtol=1e-8)


# ---------------------------------------------------------------------------
# CSV

def save_zeros(zeros, path) -> None:
    """CSV to a path or an open text stream."""
    if hasattr(path, "write"):
        _write_zeros(zeros, path)
        return
    with open(path, "w", newline="") as fh:
        _write_zeros(zeros, fh)


def _write_zeros(zeros, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["re", "im", "residual", "class", "terms"])
    for z in zeros:
        w.writerow([repr(z.re), repr(z.im), repr(z.residual), z.zclass.value, z.series_terms_used])


def load_zeros(path) -> list:
    out = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["re", "im", "residual", "class", "terms"]:
        raise ParseError("missing zero-table header re,im,residual,class,terms", 1)
    for i, r in enumerate(rows[1:], 2):
        try:
            out.append(Zero(complex(float(r[0]), float(r[1])), float(r[2]), ZeroClass(r[3]), int(r[4])))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad zero row {r}", i) from exc
    return out
