"""Raster plots of complex functions: domain colouring, x-ray curves, log modulus."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DomainError, PoleError
from .series import CoefficientSource, SeriesFunction
from .zeros import ScanConfig, scan_zeros


class PlotMode(enum.Enum):
    domain_color = "domain_color"
    xray = "xray"
    log_abs = "log_abs"


@dataclass
class PlotSpec:
    """window = (lower-left, upper-right) corners as complex numbers."""
    window: tuple = (complex(-1, 0), complex(2, 40))
    width: int = 300
    height: int = 400
    mode: PlotMode = PlotMode.domain_color
    truncation: int | None = None
    overlay_zeros: bool = False
    zeros: tuple = ()
    marker: int = 2

    def __post_init__(self):
        self.mode = PlotMode(self.mode)
        lo, hi = (complex(w) for w in self.window)
        self.window = (lo, hi)
        if self.width < 16 or self.height < 16:
            raise DomainError("image must be at least 16x16 pixels")
        if hi.real <= lo.real or hi.imag <= lo.imag:
            raise DomainError("empty plot window")

    @property
    def x_range(self):
        return self.window[0].real, self.window[1].real

    @property
    def y_range(self):
        return self.window[0].imag, self.window[1].imag


def sample_grid(f, spec: PlotSpec) -> np.ndarray:
    """Values on the pixel grid, row 0 at the top (largest y); columns in parallel."""
    xs = np.linspace(*spec.x_range, spec.width)
    ys = np.linspace(*spec.y_range, spec.height)
    if hasattr(f, "on_line"):
        dy = ys[1] - ys[0]

        def column(x):
            try:
                return np.asarray(f.on_line(float(x), float(ys[0]), float(dy), spec.height), dtype=complex)
            except PoleError:
                return np.array([_point(f, complex(x, y)) for y in ys])

        workers = kernels.get_threads()
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                cols = list(ex.map(column, xs))
        else:
            cols = [column(x) for x in xs]
        F = np.stack(cols, axis=1)
    else:
        X, Y = np.meshgrid(xs, ys)
        try:
            F = np.asarray(f(X + 1j * Y), dtype=complex)
        except PoleError:
            F = np.vectorize(lambda z: _point(f, z), otypes=[complex])(X + 1j * Y)
    return F[::-1]


def _point(f, z):
    try:
        return complex(np.asarray(f(np.array([z])))[0])
    except PoleError:
        return complex(np.inf, 0.0)


def _hsl_to_rgb(h, s, l):
    # h in [0, 1), s and l in [0, 1]
    c = (1 - np.abs(2 * l - 1)) * s
    hp = (h % 1.0) * 6
    x = c * (1 - np.abs(hp % 2 - 1))
    z = np.zeros_like(h)
    k = np.floor(hp).astype(int) % 6
    r = np.choose(k, [c, x, z, z, x, c])
    g = np.choose(k, [x, c, c, x, z, z])
    b = np.choose(k, [z, z, x, c, c, x])
    m = l - c / 2
    return np.stack([r + m, g + m, b + m], axis=-1)


def domain_color(F: np.ndarray) -> np.ndarray:
    a = np.abs(F)
    h = (np.angle(F) / (2 * np.pi)) % 1.0
    l = 1 - 1 / (1 + np.nan_to_num(a, nan=0.0, posinf=1e300) ** 0.3)
    rgb = _hsl_to_rgb(h, np.ones_like(h), l)
    return (np.clip(rgb, 0, 1) * 255).astype(np.uint8)


def xray(F: np.ndarray) -> np.ndarray:
    """White canvas; Re = 0 curves red, Im = 0 curves cyan."""
    img = np.full(F.shape + (3,), 255, dtype=np.uint8)
    for part, colour in ((F.real, (255, 0, 0)), (F.imag, (0, 200, 255))):
        s = np.sign(part)
        edge = np.zeros(F.shape, dtype=bool)
        edge[:, :-1] |= s[:, :-1] != s[:, 1:]
        edge[:-1, :] |= s[:-1, :] != s[1:, :]
        img[edge] = colour
    return img


def log_abs(F: np.ndarray) -> np.ndarray:
    v = np.log10(np.abs(F) + 1e-300)
    finite = np.isfinite(v)
    lo, hi = np.percentile(v[finite], [1, 99]) if finite.any() else (0.0, 1.0)
    g = np.clip((v - lo) / max(hi - lo, 1e-12), 0, 1)
    g = (g * 255).astype(np.uint8)
    return np.repeat(g[..., None], 3, axis=-1)


def _overlay(img, spec: PlotSpec):
    H, W = img.shape[:2]
    (x0, x1), (y0, y1) = spec.x_range, spec.y_range
    r = spec.marker
    for z in spec.zeros:
        z = complex(getattr(z, "location", z))
        i = int(round((y1 - z.imag) / (y1 - y0) * (H - 1)))
        j = int(round((z.real - x0) / (x1 - x0) * (W - 1)))
        if 0 <= i < H and 0 <= j < W:
            img[max(i - r, 0):i + r + 1, max(j - r, 0):j + r + 1] = (0, 160, 0)
    return img


def render_array(f, spec: PlotSpec) -> np.ndarray:
    if spec.truncation and isinstance(f, CoefficientSource):
        n = int(spec.truncation)
        f = SeriesFunction(f, terms=lambda t: n)
    if spec.overlay_zeros and not spec.zeros:
        cfg = ScanConfig(spec.x_range, spec.y_range,
                         (spec.x_range[1] - spec.x_range[0]) / 40, (spec.y_range[1] - spec.y_range[0]) / 2000)
        spec.zeros = tuple(scan_zeros(f, cfg))
    F = sample_grid(f, spec)
    img = {PlotMode.domain_color: domain_color, PlotMode.xray: xray,
           PlotMode.log_abs: log_abs}[spec.mode](F)
    return _overlay(img, spec)


def save_image(img: np.ndarray, path) -> Path:
    """PNG through Pillow; binary PPM if Pillow is missing or the suffix is .ppm."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".ppm":
            raise ImportError
        from PIL import Image
    except ImportError:
        path = path.with_suffix(".ppm")
        H, W = img.shape[:2]
        with open(path, "wb") as fh:
            fh.write(f"P6 {W} {H} 255\n".encode())
            fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())
        return path
    Image.fromarray(img, "RGB").save(path)
    return path


def render(f, spec: PlotSpec, out_path) -> Path:
    return save_image(render_array(f, spec), out_path)
