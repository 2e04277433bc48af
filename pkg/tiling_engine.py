"""
tiling_engine.py - Canonical and Blow-Up Tilings (Production-Ready)

T_k^(v) = s^-k pi(Omega_k^(v)) and Pi(theta) = f_-theta pi(Omega_xi(theta)),
built as sets of tiles with exact-exponent isometry bookkeeping.

FEATURES:
- Tile identity = prototile class + map within MAP_TOLERANCE (provenance ignored)
- Pi(theta) = E_theta T_xi(theta) with E_theta = f_-theta s^xi(theta)
- Isometric decomposition of T_k into lower canonical tilings
- 1D supports, letter strings and text dumps
- Lazy point-cloud realization of single tiles
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Set, Tuple

import numpy as np

from tifs_core import (
    TIFS, Word, AffineMap, FORWARD, REVERSED, UnsupportedDimension,
    as_symbols, compose, InadmissibleWord, inverse_compose, require_admissible,
    scaling_map, xi,
)
from symbolic_tiling import omega, predecessor_decomposition, prototile_letter
from attractor_geometry import attractor_deterministic, component_hulls
from production_config import MAP_TOLERANCE, NUMBER_FORMAT, log


@dataclass(frozen=True, eq=False)
class Tile:
    """
    One tile: map(A^vertex), with map = f_-context o f_body (or s^-k f_body).

    context is None for canonical tilings.
    """
    body: Word
    map: AffineMap
    vertex: int
    context: Optional[Word] = None

    @property
    def exponent(self) -> int:
        return self.map.exponent

    @property
    def prototile(self) -> Tuple[int, int]:
        return (self.vertex, self.map.exponent)

    def same_as(self, other: "Tile", tol: float = MAP_TOLERANCE) -> bool:
        return self.vertex == other.vertex and self.map.allclose(other.map, tol)


@dataclass(frozen=True, eq=False)
class Tiling:
    """
    A finite tiling with its descriptor: canonical (level, root) or Pi(theta).
    """
    tiles: Tuple[Tile, ...]
    level: int
    root: Optional[int] = None
    theta: Optional[Word] = None

    def __len__(self):
        return len(self.tiles)

    def __iter__(self) -> Iterator[Tile]:
        return iter(self.tiles)

    @property
    def label(self) -> str:
        if self.theta is not None:
            return f"Pi({self.theta})"
        root = "" if self.root is None else f"^({self.root})"
        return f"T_{self.level}{root}"

    def classes(self) -> Set[Tuple[int, int]]:
        return {tile.prototile for tile in self.tiles}


@dataclass(frozen=True)
class PrototileClass:
    """s^exponent A^vertex."""
    vertex: int
    exponent: int
    letter: str

    def realize(self, t: TIFS, depth: int) -> np.ndarray:
        """Representative cloud of the class."""
        cloud = attractor_deterministic(t, depth)
        return prototile_map(t, self).apply(cloud.component(self.vertex))


@dataclass(frozen=True, eq=False)
class CanonicalBlock:
    """E (exponent 0) placing T_level^(vertex) inside a larger canonical tiling."""
    word: Word
    isometry: AffineMap
    level: int
    vertex: int


# ============================================================================
# CONSTRUCTION
# ============================================================================
def canonical_tiling(t: TIFS, k: int, root: Optional[int] = None) -> Tiling:
    """s^-k f_sigma(A^head(sigma_last)) for sigma in Omega_k^(root)."""
    scale = scaling_map(t, -k)
    tiles = []
    for sigma in omega(t, k, root):
        f = scale.compose(compose(t, sigma))
        tiles.append(Tile(sigma, f, t.head(sigma.last)))
    log("tiling", f"T_{k} root={root}: {len(tiles)} tiles")
    return Tiling(tuple(tiles), k, root)


def context_root(t: TIFS, theta, root: Optional[int] = None) -> Optional[int]:
    """Vertex the bodies of Pi(theta) are rooted at: tail(theta_last), or root for the empty word."""
    symbols = as_symbols(theta)
    if symbols:
        return t.tail(symbols[-1])
    if root is None and t.V == 1:
        return t.vertices[0]
    return root


def tiling_of(t: TIFS, theta, root: Optional[int] = None) -> Tiling:
    """
    Pi(theta) = { f_-theta pi(sigma) : sigma in Omega_xi(theta)^(tail(theta_last)) }.

    Pi(empty) is T_0, rooted at root when given.
    """
    symbols = require_admissible(t, theta, REVERSED)
    context = Word(symbols, REVERSED)
    level = xi(t, symbols)
    v = context_root(t, symbols, root)
    place = inverse_compose(t, symbols)

    tiles = []
    for sigma in omega(t, level, v):
        f = place.compose(compose(t, sigma))
        tiles.append(Tile(sigma, f, t.head(sigma.last), context))
    log("tiling", f"Pi({context}): {len(tiles)} tiles at level {level}")
    return Tiling(tuple(tiles), level, v, context)


def prototile_set(t: TIFS) -> List[PrototileClass]:
    """{ s^i A^v : v a vertex, i = 1..a_max }, in class order."""
    return [PrototileClass(v, i, prototile_letter(t, v, i))
            for v in t.vertices for i in range(1, t.a_max + 1)]


def prototile_map(t: TIFS, cls: PrototileClass) -> AffineMap:
    return scaling_map(t, cls.exponent)


def canonical_via_theorem(t: TIFS, theta, root: Optional[int] = None) -> Tuple[AffineMap, int, Optional[int]]:
    """(E_theta, xi(theta), vertex) with E_theta = f_-theta s^xi(theta), an isometry."""
    symbols = require_admissible(t, theta, REVERSED)
    level = xi(t, symbols)
    E = inverse_compose(t, symbols).compose(scaling_map(t, level))
    return E, level, context_root(t, symbols, root)


def decompose_canonical(t: TIFS, k: int, l: int, root: Optional[int] = None) -> List[CanonicalBlock]:
    """
    T_k^(v) = U_{omega in Omega_l^(v)} E_{k,omega} T_{k - xi(omega)}^(head(omega)),
    E_{k,omega} = s^-k f_omega s^(k - xi(omega)).
    """
    blocks = []
    for w in predecessor_decomposition(t, k, l, root):
        weight = xi(t, w)
        E = scaling_map(t, -k).compose(compose(t, w)).compose(scaling_map(t, k - weight))
        blocks.append(CanonicalBlock(w, E, k - weight, t.head(w.last)))
    return blocks


def transform_tiling(tiling: Tiling, E: AffineMap) -> Tiling:
    """E applied to every tile; bodies and contexts are kept."""
    tiles = tuple(Tile(tile.body, E.compose(tile.map), tile.vertex, tile.context) for tile in tiling)
    return Tiling(tiles, tiling.level, tiling.root, tiling.theta)


# ============================================================================
# TILE IDENTITY
# ============================================================================
class TileIndex:
    """
    Map-identity lookup: tiles bucketed by class, sorted on the first
    translation coordinate, candidates confirmed on all coefficients.
    """

    def __init__(self, tiles, tol: float = MAP_TOLERANCE):
        self.tol = tol
        self.buckets: Dict[Tuple[int, int], Tuple[List[float], np.ndarray, List[Tile]]] = {}
        grouped: Dict[Tuple[int, int], List[Tile]] = {}
        for tile in tiles:
            grouped.setdefault(tile.prototile, []).append(tile)
        for cls, members in grouped.items():
            members.sort(key=lambda tile: float(tile.map.shift[0]))
            keys = [float(tile.map.shift[0]) for tile in members]
            coeffs = np.stack([tile.map.coefficients() for tile in members])
            self.buckets[cls] = (keys, coeffs, members)

    def find(self, tile: Tile) -> Optional[Tile]:
        bucket = self.buckets.get(tile.prototile)
        if bucket is None:
            return None
        keys, coeffs, members = bucket
        x = float(tile.map.shift[0])
        lo, hi = bisect_left(keys, x - self.tol), bisect_right(keys, x + self.tol)
        if lo == hi:
            return None
        diff = np.max(np.abs(coeffs[lo:hi] - tile.map.coefficients()), axis=1)
        best = int(np.argmin(diff))
        return members[lo + best] if diff[best] <= self.tol else None

    def __contains__(self, tile: Tile) -> bool:
        return self.find(tile) is not None


def contains_tile(tiling: Tiling, tile: Tile, tol: float = MAP_TOLERANCE) -> bool:
    return tile in TileIndex(tiling, tol)


def is_subtiling(small: Tiling, large: Tiling, tol: float = MAP_TOLERANCE) -> bool:
    index = TileIndex(large, tol)
    return all(tile in index for tile in small)


def tilings_equal(a: Tiling, b: Tiling, tol: float = MAP_TOLERANCE) -> bool:
    return len(a) == len(b) and is_subtiling(a, b, tol) and is_subtiling(b, a, tol)


# ============================================================================
# 1D SUPPORT AND LETTERS
# ============================================================================
@lru_cache(maxsize=32)
def _hulls(t: TIFS) -> Dict[int, Tuple[float, float]]:
    return component_hulls(t)


def tile_interval(t: TIFS, tile: Tile) -> Tuple[float, float]:
    """1D support of a tile: its map applied to the hull of A^vertex."""
    if t.M != 1:
        raise UnsupportedDimension(f"tile intervals need M = 1, got M = {t.M}")
    lo, hi = _hulls(t)[tile.vertex]
    a = float(tile.map.linear[0, 0])
    b = float(tile.map.shift[0])
    ends = (a * lo + b, a * hi + b)
    return min(ends), max(ends)


def sorted_tiles(t: TIFS, tiling: Tiling) -> List[Tile]:
    """Left to right in 1D, lexicographic body otherwise."""
    if t.M == 1:
        return sorted(tiling, key=lambda tile: tile_interval(t, tile))
    return sorted(tiling, key=lambda tile: tile.body.symbols)


def tiling_letters(t: TIFS, tiling: Tiling) -> str:
    return "".join(prototile_letter(t, tile.vertex, tile.exponent) for tile in sorted_tiles(t, tiling))


def tiling_support(t: TIFS, tiling: Tiling) -> Tuple[float, float]:
    intervals = [tile_interval(t, tile) for tile in tiling]
    return min(lo for lo, _ in intervals), max(hi for _, hi in intervals)


def interiors_disjoint(t: TIFS, tiling: Tiling, tol: float = MAP_TOLERANCE) -> bool:
    intervals = sorted(tile_interval(t, tile) for tile in tiling)
    return all(nxt[0] >= cur[1] - tol for cur, nxt in zip(intervals, intervals[1:]))


def prototile_threshold(t: TIFS, max_level: int) -> Tuple[Optional[int], Set[Tuple[int, int]]]:
    """
    Smallest canonical level whose tilings (all roots) show every class
    reachable up to max_level, and that reachable set.
    """
    seen_by_level = []
    for k in range(max_level + 1):
        classes = set()
        for v in t.vertices:
            classes |= canonical_tiling(t, k, v).classes()
        seen_by_level.append(classes)

    reachable = set().union(*seen_by_level)
    for k, classes in enumerate(seen_by_level):
        if classes == reachable:
            return k, reachable
    return None, reachable


# ============================================================================
# OUTPUT AND REALIZATION
# ============================================================================
def tiling_to_text(t: TIFS, tiling: Tiling) -> str:
    """One tile per line: context, body, prototile letter and exponent, affine coefficients."""
    lines = []
    context = tiling.label
    for tile in sorted_tiles(t, tiling):
        letter = prototile_letter(t, tile.vertex, tile.exponent)
        coeffs = " ".join(format(float(c), NUMBER_FORMAT) for c in tile.map.coefficients())
        lines.append(f"{context} {tile.body} {letter} {tile.vertex} {tile.exponent} {coeffs}")
    return "\n".join(lines) + ("\n" if lines else "")


def realize_tile(t: TIFS, tile: Tile, depth: int) -> np.ndarray:
    """Point cloud of map(A^vertex) at the given depth."""
    cloud = attractor_deterministic(t, depth)
    return tile.map.apply(cloud.component(tile.vertex))


def realize_tiling(t: TIFS, tiling: Tiling, depth: int) -> List[np.ndarray]:
    cloud = attractor_deterministic(t, depth)
    return [tile.map.apply(cloud.component(tile.vertex)) for tile in tiling]


def make_tile(t: TIFS, theta, sigma) -> Tile:
    """f_-theta f_sigma (A^head(sigma_last)) with its context recorded."""
    theta_symbols = require_admissible(t, theta, REVERSED)
    sigma_symbols = require_admissible(t, sigma, FORWARD)
    f = inverse_compose(t, theta_symbols).compose(compose(t, sigma_symbols))
    if not sigma_symbols:
        raise InadmissibleWord("a tile body must be nonempty")
    vertex = t.head(sigma_symbols[-1])
    return Tile(Word(sigma_symbols, FORWARD), f, vertex, Word(theta_symbols, REVERSED))

