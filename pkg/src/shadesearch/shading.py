"""Phong illumination applied to photographs via an intensity height field.

A grayscale copy of the input is treated as a surface z = height_scale *
gray / 255; per-pixel unit normals come from central differences of that
surface (edge rows and columns are replicated). Each pixel is then lit as

    I = ka*ia + kd*il*max(N.L, 0) + ks*il*max(N.H, 0)**ns

where the ambient and diffuse terms modulate the original channel value
(treating it as albedo) and the specular term adds a white highlight.
Negative dot products clamp to zero: one-sided lighting keeps fractional
glossiness exponents well defined.

``shade_image_tiled`` is the interpolated variant: exact normals are taken
only on a tile-corner lattice and blended affinely inside each tile. Tiles
are split along the diagonal into two triangles so that an affine
interpolant (N = A*x + B*y + C) reproduces every corner exactly; because the
light and view directions are global constants, the interpolated halfway
vector is constant per image (D = E = 0).
"""

import math
from dataclasses import dataclass

import numpy as np

from .image import GrayImage, RgbImage, to_grayscale

Vec3 = tuple[float, float, float]


class DegenerateInterpolantError(ValueError):
    """An interpolated normal or halfway vector vanished at an evaluation point."""


def unit(v) -> Vec3:
    """Normalize a 3-vector to unit length."""
    x, y, z = (float(c) for c in v)
    n = math.sqrt(x * x + y * y + z * z)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return (x / n, y / n, z / n)


DEFAULT_LIGHT_DIR = unit((1.0, 1.0, 1.0))
DEFAULT_VIEW_DIR = (0.0, 0.0, 1.0)

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class PhongParams:
    """Illumination coefficients plus the height-field scale.

    ka/kd/ks are the ambient, diffuse, and specular reflectances; ia and il
    the ambient and source light intensities; ns the glossiness exponent
    (>= 1, larger means tighter highlights).
    """

    ka: float = 0.2
    kd: float = 0.6
    ks: float = 0.3
    ia: float = 1.0
    il: float = 1.0
    ns: float = 10.0
    light_dir: Vec3 = DEFAULT_LIGHT_DIR
    view_dir: Vec3 = DEFAULT_VIEW_DIR
    height_scale: float = 10.0

    def __post_init__(self):
        for name in ("ka", "kd", "ks", "ia", "il"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.ns < 1:
            raise ValueError("ns must be >= 1")
        if self.height_scale <= 0:
            raise ValueError("height_scale must be > 0")
        for name in ("light_dir", "view_dir"):
            vec = tuple(float(c) for c in getattr(self, name))
            if len(vec) != 3:
                raise ValueError(f"{name} must be a 3-vector")
            if abs(math.sqrt(sum(c * c for c in vec)) - 1.0) > _UNIT_TOL:
                raise ValueError(f"{name} must have unit length")
            object.__setattr__(self, name, vec)
        s = [l + v for l, v in zip(self.light_dir, self.view_dir)]
        if math.sqrt(sum(c * c for c in s)) < 1e-12:
            raise ValueError("light_dir opposes view_dir; halfway vector undefined")

    @property
    def halfway(self) -> Vec3:
        """Unit halfway vector between the light and view directions."""
        return unit([l + v for l, v in zip(self.light_dir, self.view_dir)])


@dataclass(frozen=True, eq=False)
class NormalField:
    """Per-pixel unit normals of a height field; z > 0 everywhere."""

    normals: np.ndarray  # (height, width, 3) float64

    def __post_init__(self):
        arr = np.ascontiguousarray(self.normals, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) normals, got shape {arr.shape}")
        lengths = np.linalg.norm(arr, axis=2)
        if np.any(np.abs(lengths - 1.0) > _UNIT_TOL):
            raise ValueError("normals must have unit length")
        if np.any(arr[..., 2] <= 0.0):
            raise ValueError("normals must face the viewer (z > 0)")
        arr.flags.writeable = False
        object.__setattr__(self, "normals", arr)

    @property
    def width(self) -> int:
        return self.normals.shape[1]

    @property
    def height(self) -> int:
        return self.normals.shape[0]


def height_field_normals(gray: GrayImage, height_scale: float) -> NormalField:
    """Unit normals of z = height_scale * gray / 255.

    Gradients are central differences with edge replication, so 1-pixel
    dimensions degrade to zero gradient and a flat (0, 0, 1) normal.
    """
    if height_scale <= 0:
        raise ValueError("height_scale must be > 0")
    h = gray.pixels.astype(np.float64) * (height_scale / 255.0)
    padded = np.pad(h, 1, mode="edge")
    dhdx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    dhdy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    n = np.stack((-dhdx, -dhdy, np.ones_like(h)), axis=2)
    n /= np.linalg.norm(n, axis=2, keepdims=True)
    return NormalField(n)


def phong_intensity(n_dot_l: float, n_dot_h: float, p: PhongParams) -> float:
    """Scalar illumination: ambient + diffuse + specular, dots clamped at 0."""
    diffuse = p.kd * p.il * max(n_dot_l, 0.0)
    specular = p.ks * p.il * max(n_dot_h, 0.0) ** p.ns
    return p.ka * p.ia + diffuse + specular


def _compose_shaded(pixels: np.ndarray, n_dot_l: np.ndarray, n_dot_h: np.ndarray,
                    p: PhongParams) -> RgbImage:
    # Shared by both shading modes so they apply bit-identical arithmetic:
    # c' = clamp(round(ia*ka*c + il*kd*(N.L)*c + 255*il*ks*(N.H)^ns)).
    rgb = pixels.astype(np.float64)
    ambient = p.ia * p.ka * rgb
    diffuse = (p.il * p.kd * n_dot_l)[..., None] * rgb
    highlight = (255.0 * p.il * p.ks * n_dot_h**p.ns)[..., None]
    shaded = np.clip(np.floor(ambient + diffuse + highlight + 0.5), 0.0, 255.0)
    return RgbImage(shaded.astype(np.uint8))


def shade_image(img: RgbImage, p: PhongParams) -> RgbImage:
    """Per-pixel Phong shading with exact height-field normals."""
    field = height_field_normals(to_grayscale(img), p.height_scale)
    light = np.asarray(p.light_dir)
    half = np.asarray(p.halfway)
    n_dot_l = np.maximum(field.normals @ light, 0.0)
    n_dot_h = np.maximum(field.normals @ half, 0.0)
    return _compose_shaded(img.pixels, n_dot_l, n_dot_h, p)


@dataclass(frozen=True)
class TileInterpolant:
    """Affine interpolants N(x,y) = a x + b y + c and H(x,y) = d x + e y + f."""

    a: Vec3
    b: Vec3
    c: Vec3
    d: Vec3
    e: Vec3
    f: Vec3

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e", "f"):
            vec = tuple(float(v) for v in getattr(self, name))
            if len(vec) != 3:
                raise ValueError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, vec)


def tile_ndoth(t: TileInterpolant, x: float, y: float) -> float:
    """Cosine between the interpolated normal and halfway vectors at (x, y).

    Evaluates (N_xy . H_xy) / (|N_xy| |H_xy|), so neither interpolated vector
    needs unit length. Raises DegenerateInterpolantError if either vanishes.
    """
    nx = t.a[0] * x + t.b[0] * y + t.c[0]
    ny = t.a[1] * x + t.b[1] * y + t.c[1]
    nz = t.a[2] * x + t.b[2] * y + t.c[2]
    hx = t.d[0] * x + t.e[0] * y + t.f[0]
    hy = t.d[1] * x + t.e[1] * y + t.f[1]
    hz = t.d[2] * x + t.e[2] * y + t.f[2]
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    hn = math.sqrt(hx * hx + hy * hy + hz * hz)
    if nn == 0.0 or hn == 0.0:
        raise DegenerateInterpolantError(
            f"zero-length interpolated vector at ({x}, {y})"
        )
    value = (nx * hx + ny * hy + nz * hz) / (nn * hn)
    return min(1.0, max(-1.0, value))


def _lattice(extent: int, tile: int) -> list[int]:
    marks = list(range(0, extent, tile))
    if marks[-1] != extent - 1:
        marks.append(extent - 1)
    return marks


_ZERO3: Vec3 = (0.0, 0.0, 0.0)


def _delta(hi: np.ndarray, lo: np.ndarray, span: int) -> Vec3:
    if span == 0:
        return _ZERO3
    return tuple((hi - lo) / span)


def shade_image_tiled(img: RgbImage, p: PhongParams, tile: int) -> RgbImage:
    """Phong shading with normals interpolated from a tile-corner lattice.

    Exact normals are sampled every ``tile`` pixels (plus the far edge); each
    lattice cell is split into two triangles carrying affine interpolants in
    local coordinates, so lattice points reproduce the exact per-pixel
    normals. Output uses the same composition as shade_image.
    """
    if tile < 2:
        raise ValueError("tile size must be at least 2")
    field = height_field_normals(to_grayscale(img), p.height_scale)
    normals = field.normals
    h, w = field.height, field.width
    xs = _lattice(w, tile)
    ys = _lattice(h, tile)
    light = p.light_dir
    halfway = p.halfway
    n_dot_l = np.empty((h, w))
    n_dot_h = np.empty((h, w))
    nx_cells = max(1, len(xs) - 1)
    ny_cells = max(1, len(ys) - 1)
    for j in range(ny_cells):
        y0 = ys[j]
        y1 = ys[j + 1] if len(ys) > 1 else y0
        y_stop = (y1 + 1) if j == ny_cells - 1 else y1
        for i in range(nx_cells):
            x0 = xs[i]
            x1 = xs[i + 1] if len(xs) > 1 else x0
            x_stop = (x1 + 1) if i == nx_cells - 1 else x1
            dx, dy = x1 - x0, y1 - y0
            n00, n10 = normals[y0, x0], normals[y0, x1]
            n01, n11 = normals[y1, x0], normals[y1, x1]
            # Upper-left triangle anchored at n00; lower-right at the
            # opposite corners. Coefficients live in local (x-x0, y-y0).
            upper = (_delta(n10, n00, dx), _delta(n01, n00, dy), tuple(n00))
            lower = (_delta(n11, n01, dx), _delta(n11, n10, dy), tuple(n10 + n01 - n11))
            interps = {
                True: (
                    TileInterpolant(*upper, _ZERO3, _ZERO3, halfway),
                    TileInterpolant(*upper, _ZERO3, _ZERO3, light),
                ),
                False: (
                    TileInterpolant(*lower, _ZERO3, _ZERO3, halfway),
                    TileInterpolant(*lower, _ZERO3, _ZERO3, light),
                ),
            }
            for y in range(y0, y_stop):
                ly = y - y0
                for x in range(x0, x_stop):
                    lx = x - x0
                    on_upper = dx == 0 or dy == 0 or lx * dy + ly * dx <= dx * dy
                    t_h, t_l = interps[on_upper]
                    n_dot_h[y, x] = max(tile_ndoth(t_h, lx, ly), 0.0)
                    n_dot_l[y, x] = max(tile_ndoth(t_l, lx, ly), 0.0)
    return _compose_shaded(img.pixels, n_dot_l, n_dot_h, p)
