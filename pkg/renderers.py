"""
renderers.py - Tiling and Attractor Renderers (Production-Ready)

FEATURES:
- SVG for tilings: 1D tiles as rectangles, 2D tiles as point clusters
- P6 raster for 2D point clouds via Pillow (bit-exact for fixed inputs)
- Prototile classes coloured from the centralized palette
- Deterministic element order (tile sort key) and 17-digit numbers
"""

import io
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from PIL import Image

from tifs_core import TIFS, UnsupportedDimension
from attractor_geometry import PointCloud
from tiling_engine import Tiling, realize_tiling, sorted_tiles, tile_interval, tiling_support
from production_config import (
    RENDER_WIDTH, RENDER_HEIGHT, RENDER_DEPTH, RENDER_MARGIN,
    TILE_HEIGHT_RATIO, POINT_RADIUS, BACKGROUND_COLOR, COLOR_PALETTE,
    NUMBER_FORMAT, log,
)

Color = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class RenderSpec:
    """
    viewport : (lo, hi) corners of an axis-aligned box in R^M
    width, height : pixels
    depth : realization depth for 2D tile clouds
    palette : prototile class (vertex, exponent) -> colour, for SVG tilings;
              classes it leaves out take their class_palette colour.
              Rasters colour points by vertex (vertex_palette).
    """
    viewport: Tuple[np.ndarray, np.ndarray]
    width: int = RENDER_WIDTH
    height: int = RENDER_HEIGHT
    depth: int = RENDER_DEPTH
    palette: Optional[Dict[Tuple[int, int], Color]] = None

    def __post_init__(self):
        lo, hi = (np.asarray(c, dtype=float) for c in self.viewport)
        if np.any(hi <= lo):
            raise ValueError(f"empty viewport {lo} .. {hi}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"pixels must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "viewport", (lo, hi))


def class_palette(t: TIFS) -> Dict[Tuple[int, int], Color]:
    """One colour per (vertex, exponent), in class order."""
    palette = {}
    for n, (v, i) in enumerate((v, i) for v in t.vertices for i in range(1, t.a_max + 1)):
        palette[(v, i)] = COLOR_PALETTE[n % len(COLOR_PALETTE)]
    return palette


def vertex_palette(t: TIFS) -> Dict[int, Color]:
    return {v: COLOR_PALETTE[n % len(COLOR_PALETTE)] for n, v in enumerate(t.vertices)}


def padded_viewport(lo, hi) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    span = np.where(hi > lo, hi - lo, 1.0)
    return lo - RENDER_MARGIN * span, hi + RENDER_MARGIN * span


def spec_for_tiling(t: TIFS, tiling: Tiling, depth: int = RENDER_DEPTH) -> RenderSpec:
    if t.M == 1:
        if len(tiling):
            lo, hi = tiling_support(t, tiling)
        else:
            lo, hi = 0.0, 1.0
        viewport = padded_viewport([lo], [hi])
    elif t.M == 2:
        clouds = realize_tiling(t, tiling, depth)
        if clouds:
            points = np.concatenate(clouds)
            viewport = padded_viewport(points.min(axis=0), points.max(axis=0))
        else:
            viewport = padded_viewport([0.0, 0.0], [1.0, 1.0])
    else:
        raise UnsupportedDimension(f"rendering needs M in (1, 2), got M = {t.M}")
    return RenderSpec(viewport, depth=depth, palette=class_palette(t))


def spec_for_cloud(t: TIFS, cloud: PointCloud) -> RenderSpec:
    if len(cloud):
        lo, hi = cloud.bounds()
    else:
        lo, hi = np.zeros(t.M), np.ones(t.M)
    return RenderSpec(padded_viewport(lo, hi))


def _num(x: float) -> str:
    return format(float(x), NUMBER_FORMAT)


def _rgb(color: Color) -> str:
    return "rgb({},{},{})".format(*color)


# ============================================================================
# SVG
# ============================================================================
def render_svg(t: TIFS, tiling: Tiling, spec: RenderSpec) -> str:
    """Vector document for a 1D or 2D tiling; elements follow the tile sort key."""
    if t.M not in (1, 2):
        raise UnsupportedDimension(f"SVG rendering needs M in (1, 2), got M = {t.M}")

    palette = {**class_palette(t), **(spec.palette or {})}
    lo, hi = spec.viewport
    W, H = spec.width, spec.height
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="{_rgb(BACKGROUND_COLOR)}"/>',
    ]

    tiles = sorted_tiles(t, tiling)
    if t.M == 1:
        scale = W / (hi[0] - lo[0])
        height = TILE_HEIGHT_RATIO * W
        y = (H - height) / 2.0
        for tile in tiles:
            a, b = tile_interval(t, tile)
            x = (a - lo[0]) * scale
            parts.append(
                f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num((b - a) * scale)}" '
                f'height="{_num(height)}" fill="{_rgb(palette[tile.prototile])}" '
                f'stroke="black" stroke-width="1"/>'
            )
    else:
        sx = W / (hi[0] - lo[0])
        sy = H / (hi[1] - lo[1])
        clouds = realize_tiling(t, Tiling(tuple(tiles), tiling.level), spec.depth)
        for tile, cloud in zip(tiles, clouds):
            color = _rgb(palette[tile.prototile])
            parts.append(f'<g fill="{color}">')
            for x, y in cloud:
                parts.append(f'<circle cx="{_num((x - lo[0]) * sx)}" cy="{_num((hi[1] - y) * sy)}" r="{POINT_RADIUS}"/>')
            parts.append('</g>')

    parts.append('</svg>')
    log("render", f"SVG {W}x{H}: {len(tiles)} tiles")
    return "\n".join(parts) + "\n"


# ============================================================================
# RASTER
# ============================================================================
def _pixel(value: np.ndarray, lo: float, hi: float, size: int) -> np.ndarray:
    """Nearest pixel, round half up."""
    return np.floor((value - lo) / (hi - lo) * (size - 1) + 0.5).astype(np.int64)


def render_ppm(t: TIFS, cloud: PointCloud, spec: RenderSpec) -> bytes:
    """P6 raster of a 2D cloud: one dot per point, coloured by vertex, y axis up."""
    if t.M != 2:
        raise UnsupportedDimension(f"raster rendering needs M = 2, got M = {t.M}")

    W, H = spec.width, spec.height
    lo, hi = spec.viewport
    raster = np.empty((H, W, 3), dtype=np.uint8)
    raster[:, :] = BACKGROUND_COLOR

    if len(cloud):
        cols = _pixel(cloud.points[:, 0], lo[0], hi[0], W)
        rows = (H - 1) - _pixel(cloud.points[:, 1], lo[1], hi[1], H)
        inside = (cols >= 0) & (cols < W) & (rows >= 0) & (rows < H)
        colors = vertex_palette(t)
        for v, color in colors.items():
            keep = inside & (cloud.tags == v)
            raster[rows[keep], cols[keep]] = color

    buffer = io.BytesIO()
    Image.fromarray(raster).save(buffer, format="PPM")
    log("render", f"PPM {W}x{H}: {len(cloud)} points, {_lit(raster)} lit pixels")
    return buffer.getvalue()


def lit_pixels(data: bytes) -> int:
    """Pixels differing from the background in a P6 raster."""
    return _lit(np.asarray(Image.open(io.BytesIO(data)).convert("RGB")))


def _lit(raster: np.ndarray) -> int:
    return int(np.count_nonzero(np.any(raster != np.array(BACKGROUND_COLOR, dtype=np.uint8), axis=2)))


def ppm_header(width: int, height: int) -> bytes:
    return f"P6\n{width} {height}\n255\n".encode("ascii")

