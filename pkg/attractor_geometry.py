"""
attractor_geometry.py - Attractor Point Clouds (Production-Ready)

Controlled approximations of the components A^v and of the coding map pi.

FEATURES:
- Deterministic algorithm: f_sigma(seed) over all words of a fixed length
- Chaos game driven by a documented SplitMix64 generator (bit-reproducible)
- Exact 1D component hulls from the interval fixed-point equation
- Grid-bucketed one-sided proximity checks between clouds
- Component overlap diagnosis (warning-level, used by validation)
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from tifs_core import (
    TIFS, FORWARD, DepthTooLarge, UnsupportedDimension,
    compose, require_admissible, similitude_map,
)
from production_config import (
    MAX_CLOUD_WORDS, CHAOS_BURN_IN, DEFAULT_RNG_SEED,
    HULL_TOLERANCE, HULL_MAX_ITERATIONS,
    OVERLAP_CHECK_DEPTH, OVERLAP_TOLERANCE, OVERLAP_FRACTION,
    NUMBER_FORMAT, log,
)

MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    Points of several components, tagged by vertex.

    points : (n, M) array
    tags   : (n,) vertex of each point
    depth  : refinement depth (None for chaos-game clouds)
    error_bound : Hausdorff bound to the true components (None when unknown)
    """
    points: np.ndarray
    tags: np.ndarray
    depth: Optional[int] = None
    error_bound: Optional[float] = None

    def __len__(self):
        return len(self.points)

    def component(self, v: int) -> np.ndarray:
        return self.points[self.tags == v]

    def by_vertex(self) -> Dict[int, np.ndarray]:
        return {int(v): self.component(v) for v in np.unique(self.tags)}

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)


def default_seeds(t: TIFS) -> Dict[int, np.ndarray]:
    return {v: np.zeros(t.M) for v in t.vertices}


def _seed_radius(t: TIFS, seeds: Dict[int, np.ndarray]) -> float:
    """delta = max_e |f_e(seed_head(e)) - seed_tail(e)|."""
    return max(
        float(np.linalg.norm(similitude_map(t, e).apply(seeds[t.head(e)]) - seeds[t.tail(e)]))
        for e in range(1, t.N + 1)
    )


def error_bound(t: TIFS, depth: int, seeds: Dict[int, np.ndarray]) -> float:
    lam = t.contraction
    return lam ** depth * _seed_radius(t, seeds) / (1.0 - lam)


# ============================================================================
# DETERMINISTIC ALGORITHM
# ============================================================================
def hutchinson_step(t: TIFS, cloud: PointCloud) -> PointCloud:
    """
    One sweep of the graph Hutchinson operator:
        A^v <- U_{tail(e) = v} f_e(A^head(e))
    """
    components = cloud.by_vertex()
    points, tags = [], []
    for v in t.vertices:
        for e in t.edges_from(v):
            source = components.get(t.head(e))
            if source is None or len(source) == 0:
                continue
            points.append(similitude_map(t, e).apply(source))
            tags.append(np.full(len(source), v, dtype=int))

    depth = None if cloud.depth is None else cloud.depth + 1
    bound = None if cloud.error_bound is None else cloud.error_bound * t.contraction
    return PointCloud(np.concatenate(points), np.concatenate(tags), depth, bound)


def _word_counts(t: TIFS, depth: int) -> List[int]:
    """Number of forward words of length d, for d = 0..depth (all roots)."""
    per_vertex = {v: 1 for v in t.vertices}
    totals = [t.V]
    for _ in range(depth):
        per_vertex = {v: sum(per_vertex[t.head(e)] for e in t.edges_from(v)) for v in t.vertices}
        totals.append(sum(per_vertex.values()))
    return totals


def attractor_deterministic(t: TIFS, depth: int,
                            seeds: Optional[Dict[int, np.ndarray]] = None) -> PointCloud:
    """
    {f_sigma(seed_head(sigma_last)) : |sigma| = depth}, tagged by tail(sigma_1).

    Parameters
    ----------
    t : TIFS
    depth : int
        Word length d >= 0
    seeds : dict, optional
        One point per vertex (default: the origin)

    Returns
    -------
    PointCloud with error_bound = lambda^d * delta / (1 - lambda)
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    words = _word_counts(t, depth)[-1]
    if words > MAX_CLOUD_WORDS:
        raise DepthTooLarge(f"depth {depth} needs {words} words (cap {MAX_CLOUD_WORDS})")

    seeds = default_seeds(t) if seeds is None else {v: np.asarray(p, dtype=float) for v, p in seeds.items()}
    cloud = PointCloud(
        np.stack([seeds[v] for v in t.vertices]),
        np.array(t.vertices, dtype=int),
        0,
        error_bound(t, 0, seeds),
    )
    for _ in range(depth):
        cloud = hutchinson_step(t, cloud)

    log("geometry", f"deterministic depth={depth}: {len(cloud)} points, error <= {cloud.error_bound:.3g}")
    return cloud


def pi_realize(t: TIFS, sigma, depth: int) -> PointCloud:
    """Cloud of pi(sigma) = f_sigma(A^head(sigma_last)); pi(empty) = A."""
    symbols = require_admissible(t, sigma, FORWARD)
    cloud = attractor_deterministic(t, depth)
    if not symbols:
        return cloud

    f = compose(t, symbols)
    source = cloud.component(t.head(symbols[-1]))
    tags = np.full(len(source), t.tail(symbols[0]), dtype=int)
    return PointCloud(f.apply(source), tags, depth, cloud.error_bound * t.s ** f.exponent)


# ============================================================================
# CHAOS GAME
# ============================================================================
class SplitMix64:
    """
    64-bit generator, all arithmetic mod 2^64:
        state += 0x9E3779B97F4A7C15
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def choice(self, count: int) -> int:
        """Uniform index in [0, count)."""
        return (self.next_u64() * count) >> 64


def chaos_game(t: TIFS, n_points: int, seed_value=None,
               rng_seed: int = DEFAULT_RNG_SEED, burn_in: int = CHAOS_BURN_IN) -> PointCloud:
    """
    x_n = f_e(x_{n-1}) with e uniform among edges whose head is the current
    vertex; the vertex then moves to tail(e) and tags the emitted point.
    """
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")

    rng = SplitMix64(rng_seed)
    maps = {e: similitude_map(t, e) for e in range(1, t.N + 1)}
    vertex = t.vertices[0]
    x = np.zeros(t.M) if seed_value is None else np.asarray(seed_value, dtype=float)

    points = np.empty((n_points, t.M))
    tags = np.empty(n_points, dtype=int)
    for step in range(burn_in + n_points):
        options = t.edges_into(vertex)
        e = options[rng.choice(len(options))]
        x = maps[e].apply(x)
        vertex = t.tail(e)
        if step >= burn_in:
            points[step - burn_in] = x
            tags[step - burn_in] = vertex

    log("geometry", f"chaos game: {n_points} points (burn-in {burn_in}, seed {rng_seed})")
    return PointCloud(points, tags)


# ============================================================================
# HULLS, PROXIMITY, OVERLAPS
# ============================================================================
def component_hulls(t: TIFS) -> Dict[int, Tuple[float, float]]:
    """
    1D: [lo_v, hi_v] = convex hull of A^v, from
        lo_v = min_{tail(e)=v} min f_e([lo_head, hi_head]), hi_v likewise.
    """
    if t.M != 1:
        raise UnsupportedDimension(f"component hulls need M = 1, got M = {t.M}")

    coeffs = {e: (float(similitude_map(t, e).linear[0, 0]), float(t.edge(e).q[0]))
              for e in range(1, t.N + 1)}
    hulls = {v: (0.0, 0.0) for v in t.vertices}
    for iteration in range(HULL_MAX_ITERATIONS):
        updated = {}
        for v in t.vertices:
            ends = []
            for e in t.edges_from(v):
                m, q = coeffs[e]
                lo, hi = hulls[t.head(e)]
                ends.extend((m * lo + q, m * hi + q))
            updated[v] = (min(ends), max(ends))
        change = max(abs(updated[v][i] - hulls[v][i]) for v in t.vertices for i in (0, 1))
        hulls = updated
        if change <= HULL_TOLERANCE:
            break
    else:
        log("geometry", f"hulls not settled after {HULL_MAX_ITERATIONS} iterations", level="WARN")
    return hulls


def coverage_mask(src: np.ndarray, dst: np.ndarray, tol: float) -> np.ndarray:
    """
    Per src point: is there a dst point in a neighbouring grid cell.

    Cells have side tol / (2 sqrt(M)), so a hit is always within tol.
    """
    src = np.atleast_2d(np.asarray(src, dtype=float))
    dst = np.atleast_2d(np.asarray(dst, dtype=float))
    if len(src) == 0 or len(dst) == 0:
        return np.zeros(len(src), dtype=bool)

    M = src.shape[1]
    cell = tol / (2.0 * math.sqrt(M))
    origin = np.minimum(src.min(axis=0), dst.min(axis=0))
    src_cells = np.floor((src - origin) / cell).astype(np.int64) + 1
    dst_cells = np.floor((dst - origin) / cell).astype(np.int64) + 1
    stride = int(max(src_cells.max(), dst_cells.max())) + 2
    weights = stride ** np.arange(M, dtype=np.int64)

    dst_keys = np.unique(dst_cells @ weights)
    src_keys = src_cells @ weights
    hit = np.zeros(len(src), dtype=bool)
    for offset in itertools.product((-1, 0, 1), repeat=M):
        keys = src_keys + int(np.dot(offset, weights))
        pos = np.clip(np.searchsorted(dst_keys, keys), 0, len(dst_keys) - 1)
        hit |= dst_keys[pos] == keys
    return hit


def coverage_fraction(src: np.ndarray, dst: np.ndarray, tol: float) -> float:
    """Share of src points lying within tol of dst; 1.0 for an empty src."""
    if len(src) == 0:
        return 1.0
    return float(coverage_mask(src, dst, tol).mean())


def covered(src: np.ndarray, dst: np.ndarray, tol: float) -> bool:
    """Every src point lies within tol of dst (one-sided, grid-bucketed)."""
    return coverage_fraction(src, dst, tol) == 1.0


def diagnose_overlaps(t: TIFS, depth: int = OVERLAP_CHECK_DEPTH,
                      tol: float = OVERLAP_TOLERANCE) -> List[str]:
    """
    Notes on component pairs whose supports appear to overlap.

    1D compares hull interiors exactly; higher dimensions compare clouds.
    """
    notes = []
    if t.V < 2:
        return notes

    if t.M == 1:
        hulls = component_hulls(t)
        for v, w in itertools.combinations(t.vertices, 2):
            lo = max(hulls[v][0], hulls[w][0])
            hi = min(hulls[v][1], hulls[w][1])
            if hi - lo > tol:
                notes.append(f"A^{v} and A^{w} hulls overlap on [{lo:.6g}, {hi:.6g}]")
        return notes

    while depth > 0 and _word_counts(t, depth)[-1] > MAX_CLOUD_WORDS:
        depth -= 1
    cloud = attractor_deterministic(t, depth)
    for v, w in itertools.combinations(t.vertices, 2):
        fraction = coverage_fraction(cloud.component(v), cloud.component(w), tol)
        if fraction > OVERLAP_FRACTION:
            notes.append(f"A^{v} and A^{w} share {fraction:.1%} of sampled points")
    return notes


def cloud_to_text(cloud: PointCloud) -> str:
    """One point per line: vertex tag, then coordinates at 17 significant digits."""
    lines = []
    for v, p in zip(cloud.tags, cloud.points):
        coords = " ".join(format(float(c), NUMBER_FORMAT) for c in p)
        lines.append(f"{int(v)} {coords}")
    return "\n".join(lines) + ("\n" if lines else "")


def points_in_hulls(t: TIFS, cloud: PointCloud, slack: float = 0.0) -> bool:
    """1D: every point lies in the hull of its tagged component."""
    hulls = component_hulls(t)
    for v, pts in cloud.by_vertex().items():
        lo, hi = hulls[v]
        if len(pts) and (pts.min() < lo - slack or pts.max() > hi + slack):
            return False
    return True

