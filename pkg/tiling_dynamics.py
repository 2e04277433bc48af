"""
tiling_dynamics.py - Inflation, Deflation and Tiling Equivalence (Production-Ready)

Operators and searches on tilings built by tiling_engine.

FEATURES:
- deflate (amalgamate partner sets, shrink by s) and inflate (expand, split)
- Equivalence witnesses E = E_theta|p o E_psi|q^-1 with deterministic search order
- Shift dynamics on equivalence classes (padding words of adjusted xi)
- Self-similarities of eventually periodic blow-ups
- Patch occurrence search by prototile anchoring
- Local-rigidity heuristic on point clouds (never claims a proof)
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from tifs_core import (
    TIFS, Word, AffineMap, FORWARD, REVERSED,
    EmptyPeriod, Inconclusive, NotDeflatable, PrefixTooShort,
    as_symbols, compose, format_word, identity_map, inverse_compose,
    require_admissible, scaling_map, similitude_map, xi,
)
from symbolic_tiling import omega
from attractor_geometry import attractor_deterministic, coverage_fraction, coverage_mask
from tiling_engine import (
    Tile, Tiling, TileIndex, canonical_via_theorem, tiling_of, transform_tiling,
)
from production_config import (
    EQUIVALENCE_BOUND, RIGIDITY_DEPTH, RIGIDITY_TOLERANCE, MAP_TOLERANCE, log,
)

COMMON_TAIL = "γ"


# ============================================================================
# INFLATION / DEFLATION
# ============================================================================
def _partner_parent(t: TIFS, tile: Tile, index: TileIndex) -> Optional[Tuple[AffineMap, int]]:
    """
    (parent map, last symbol) when the tile belongs to a partner set E.T_0^v
    (parent = map o f_j^-1 with exponent 0), else None.
    """
    if tile.body:
        j = tile.body.last
        if tile.exponent - t.a(j) != 0:
            return None
        return tile.map.compose(similitude_map(t, j).inverse()), j

    # no provenance: every compatible last symbol is a candidate
    found = []
    for j in t.edges_into(tile.vertex):
        if tile.exponent - t.a(j) != 0:
            continue
        parent = tile.map.compose(similitude_map(t, j).inverse())
        if _siblings(t, parent, j, index) is not None:
            found.append((parent, j))
    if len(found) > 1:
        raise NotDeflatable(f"tile {tile.map.describe()} has {len(found)} candidate partner sets")
    return found[0] if found else None


def _siblings(t: TIFS, parent: AffineMap, j: int, index: TileIndex) -> Optional[List[Tile]]:
    members = []
    for i in t.edges_from(t.tail(j)):
        probe = Tile(Word(), parent.compose(similitude_map(t, i)), t.head(i))
        hit = index.find(probe)
        if hit is None:
            return None
        members.append(hit)
    return members


def deflate(t: TIFS, tiling: Tiling) -> Tiling:
    """
    Amalgamate every partner set E.T_0^v into s.E.A^v and shrink the rest by s.

    deflate(T_k) = T_{k-1}.
    """
    if tiling.level < 1:
        raise NotDeflatable(f"{tiling.label} has level {tiling.level}; deflation needs level >= 1")

    index = TileIndex(tiling)
    shrink = scaling_map(t, 1)
    consumed = set()
    tiles = []
    for tile in tiling:
        if id(tile) in consumed:
            continue
        partner = _partner_parent(t, tile, index)
        if partner is None:
            if tile.exponent + 1 > t.a_max:
                raise NotDeflatable(f"tile {tile.body} would exceed exponent {t.a_max}")
            tiles.append(Tile(tile.body, shrink.compose(tile.map), tile.vertex, tile.context))
            continue

        parent, j = partner
        members = _siblings(t, parent, j, index)
        if members is None:
            raise NotDeflatable(f"incomplete partner set around tile {tile.body}")
        consumed.update(id(m) for m in members)
        tiles.append(Tile(tile.body[:-1], shrink.compose(parent), t.tail(j), tile.context))

    log("dynamics", f"deflate {tiling.label}: {len(tiling)} -> {len(tiles)} tiles")
    return Tiling(tuple(tiles), tiling.level - 1, tiling.root)


def inflate(t: TIFS, tiling: Tiling) -> Tiling:
    """Expand by s^-1 and split every tile that reaches exponent 0 into its children."""
    expand = scaling_map(t, -1)
    tiles = []
    for tile in tiling:
        f = expand.compose(tile.map)
        if f.exponent > 0:
            tiles.append(Tile(tile.body, f, tile.vertex, tile.context))
            continue
        for j in t.edges_from(tile.vertex):
            tiles.append(Tile(tile.body + (j,), f.compose(similitude_map(t, j)), t.head(j), tile.context))

    log("dynamics", f"inflate {tiling.label}: {len(tiling)} -> {len(tiles)} tiles")
    return Tiling(tuple(tiles), tiling.level + 1, tiling.root)


def deflate_to_shift(t: TIFS, theta, k: int) -> Tuple[Tiling, Tiling]:
    """
    (deflate^xi(theta|k)(E_theta|k^-1 Pi(theta)), Pi(S^k theta)); the two agree.
    """
    symbols = require_admissible(t, theta, REVERSED)
    if not 0 <= k <= len(symbols):
        raise ValueError(f"k = {k} outside [0, {len(symbols)}]")

    E, _, _ = canonical_via_theorem(t, symbols[:k])
    current = transform_tiling(tiling_of(t, symbols), E.inverse())
    for _ in range(xi(t, symbols[:k])):
        current = deflate(t, current)

    root = t.tail(symbols[-1]) if symbols else None
    return current, tiling_of(t, symbols[k:], root)


def inflate_blowup_step(t: TIFS, theta, n: int) -> Tuple[Tiling, Tiling]:
    """(inflate^a_n Pi(theta), s^-a_n f_n Pi(n theta)); the two agree."""
    symbols = require_admissible(t, (n,) + as_symbols(theta), REVERSED)[1:]
    current = tiling_of(t, symbols, t.tail(n))
    for _ in range(t.a(n)):
        current = inflate(t, current)

    place = scaling_map(t, -t.a(n)).compose(similitude_map(t, n))
    return current, transform_tiling(tiling_of(t, (n,) + symbols), place)


@dataclass(frozen=True, eq=False)
class HierarchyLevel:
    """F places T_level^(vertex) inside T_xi(sigma)."""
    suffix: Word
    isometry: AffineMap
    level: int
    vertex: int


def hierarchy(t: TIFS, sigma) -> List[HierarchyLevel]:
    """
    For a forward word sigma, F_j = s^-xi(sigma) f_sigma|(n-j) s^xi(S^(n-j) sigma),
    j = 0..n: the nested chain of canonical tilings inside T_xi(sigma).
    """
    symbols = require_admissible(t, sigma, FORWARD)
    n = len(symbols)
    total = xi(t, symbols)
    levels = []
    for j in range(n + 1):
        prefix, suffix = symbols[:n - j], symbols[n - j:]
        F = scaling_map(t, -total).compose(compose(t, prefix)).compose(scaling_map(t, xi(t, suffix)))
        vertex = t.head(prefix[-1]) if prefix else t.tail(symbols[0])
        levels.append(HierarchyLevel(Word(suffix, FORWARD), F, xi(t, suffix), vertex))
    return levels


# ============================================================================
# EQUIVALENCE
# ============================================================================
@dataclass(frozen=True, eq=False)
class EquivalenceWitness:
    """Pi(theta) = E Pi(psi) with xi(theta|p) == xi(psi|q) and S^p theta == S^q psi."""
    p: int
    q: int
    E: AffineMap

    def describe(self) -> str:
        return f"p={self.p} q={self.q} E: {self.E.describe()}"


@dataclass(frozen=True)
class ClassRep:
    """[prefix . tail]: a reversed-word prefix followed by a named unknown tail."""
    prefix: Tuple[int, ...] = ()
    tail: str = COMMON_TAIL

    def __str__(self):
        return f"[{format_word(self.prefix) if self.prefix else ''}{self.tail}]"


def _tails_match(rest_a, rest_b, common_tail: bool) -> bool:
    if common_tail or rest_a == rest_b:
        return rest_a == rest_b
    overlap = min(len(rest_a), len(rest_b))
    return overlap > 0 and rest_a[:overlap] == rest_b[:overlap]


def check_equivalence(t: TIFS, theta, psi, bound: int = EQUIVALENCE_BOUND,
                      common_tail: bool = False) -> EquivalenceWitness:
    """
    Search p, q <= bound (by p + q, then p) with xi(theta|p) == xi(psi|q) and
    matching shifted tails.

    common_tail: theta and psi are prefixes followed by one shared unknown
    tail, so the remainders must be equal; otherwise they are compared on
    their (nonempty) overlap.

    Raises Inconclusive when no witness exists within the bound.
    """
    a = require_admissible(t, theta, REVERSED)
    b = require_admissible(t, psi, REVERSED)
    for total in range(2 * bound + 1):
        for p in range(max(0, total - bound), min(total, bound) + 1):
            q = total - p
            if p > len(a) or q > len(b):
                continue
            if xi(t, a[:p]) != xi(t, b[:q]):
                continue
            if not _tails_match(a[p:], b[q:], common_tail):
                continue
            E_a, _, _ = canonical_via_theorem(t, a[:p])
            E_b, _, _ = canonical_via_theorem(t, b[:q])
            witness = EquivalenceWitness(p, q, E_a.compose(E_b.inverse()))
            log("dynamics", f"{format_word(a)} ~ {format_word(b)}: {witness.describe()}")
            return witness

    raise Inconclusive(f"no witness for {format_word(a)} ~ {format_word(b)} within bound {bound}")


def verify_witness(t: TIFS, theta, psi, witness: EquivalenceWitness, m: int,
                   tol: float = MAP_TOLERANCE) -> bool:
    """E Pi(psi|m) is contained in Pi(theta|m - q + p)."""
    a, b = as_symbols(theta), as_symbols(psi)
    level = m - witness.q + witness.p
    if m < witness.q or m > len(b) or level > len(a):
        raise ValueError(f"m = {m} not usable with p={witness.p} q={witness.q}")

    image = transform_tiling(tiling_of(t, b[:m]), witness.E)
    index = TileIndex(tiling_of(t, a[:level]), tol)
    return all(tile in index for tile in image)


def same_class(t: TIFS, rep_a: ClassRep, rep_b: ClassRep, bound: int = EQUIVALENCE_BOUND) -> bool:
    """True when a witness is found; False means none within the bound."""
    try:
        check_equivalence(t, rep_a.prefix, rep_b.prefix, bound, common_tail=rep_a.tail == rep_b.tail)
        return True
    except Inconclusive:
        return False


def _padding(t: TIFS, target: int, join: Optional[int]) -> Optional[Tuple[int, ...]]:
    """
    First reversed-admissible word (ascending symbol order) with xi == target
    whose last symbol has tail == join (any vertex when join is None).
    The empty word qualifies for 0.
    """
    if target < 0:
        return None
    if target == 0:
        return ()

    stack = [((j,), t.a(j)) for j in range(t.N, 0, -1)]
    while stack:
        word, weight = stack.pop()
        if weight == target:
            if join is None or t.tail(word[-1]) == join:
                return word
            continue
        if weight > target:
            continue
        for j in sorted(t.edges_into(t.tail(word[-1])), reverse=True):
            stack.append((word + (j,), weight + t.a(j)))
    return None


def shift_class(t: TIFS, rep: ClassRep, direction: str = "forward") -> ClassRep:
    """
    forward:  [theta] -> [rho S^j theta] with xi(rho) = xi(theta|j) - 1
    backward: [theta] -> [rho S^j theta] with xi(rho) = xi(theta|j) + 1
    for the smallest workable j.
    """
    prefix = require_admissible(t, rep.prefix, REVERSED)
    delta = -1 if direction == "forward" else 1
    start = 1 if direction == "forward" else 0

    for j in range(start, len(prefix) + 1):
        if j > 0:
            join = t.tail(prefix[j - 1])
        elif prefix:
            join = t.head(prefix[0])
        elif t.V == 1:
            join = None
        else:
            continue
        pad = _padding(t, xi(t, prefix[:j]) + delta, join)
        if pad is not None:
            shifted = ClassRep(pad + prefix[j:], rep.tail)
            log("dynamics", f"shift {direction}: {rep} -> {shifted}")
            return shifted

    raise PrefixTooShort(f"{rep}: no usable split point for a {direction} shift")


# ============================================================================
# SELF-SIMILARITY AND PATCHES
# ============================================================================
def self_similarity(t: TIFS, alpha, beta) -> AffineMap:
    """psi = f_-alpha o f_-beta o f_-alpha^-1 for theta = alpha beta beta ..., exponent -xi(beta)."""
    a = as_symbols(alpha)
    b = as_symbols(beta)
    if not b:
        raise EmptyPeriod("the period beta must be nonempty")
    require_admissible(t, a + b + b, REVERSED)

    f_alpha = inverse_compose(t, a)
    psi = f_alpha.compose(inverse_compose(t, b)).compose(f_alpha.inverse())
    return AffineMap(psi.linear, psi.shift, -xi(t, b))


def periodic_prefix(alpha, beta, length: int) -> Tuple[int, ...]:
    """(alpha beta beta ...)|length."""
    a, b = as_symbols(alpha), as_symbols(beta)
    word = list(a)
    while len(word) < length:
        word.extend(b)
    return tuple(word[:length])


def is_self_similar_at(t: TIFS, alpha, beta, level: int) -> bool:
    """psi maps every tile of Pi(theta|level) onto a union of tiles of Pi(theta|level + |beta|)."""
    a, b = as_symbols(alpha), as_symbols(beta)
    if level < len(a):
        raise ValueError(f"level {level} is shorter than alpha ({len(a)})")

    psi = self_similarity(t, a, b)
    small = tiling_of(t, periodic_prefix(a, b, level))
    index = TileIndex(tiling_of(t, periodic_prefix(a, b, level + len(b))))
    for tile in small:
        g = psi.compose(tile.map)
        m = -g.exponent
        if m < 0:
            if Tile(Word(), g, tile.vertex) not in index:
                return False
            continue
        for rho in omega(t, m, tile.vertex):
            piece = Tile(Word(), g.compose(compose(t, rho)), t.head(rho.last))
            if piece not in index:
                return False
    return True


def find_patch_occurrences(t: TIFS, tiling: Tiling, patch, radius: Optional[float] = None) -> List[AffineMap]:
    """
    Isometries E (exponent 0) with E.patch contained in tiling, anchored on
    the first patch tile and confirmed tile by tile.
    """
    patch = list(patch)
    if not patch:
        return []
    anchor = patch[0]
    index = TileIndex(tiling)
    anchor_inverse = anchor.map.inverse()

    found = []
    for u in tiling:
        if u.prototile != anchor.prototile:
            continue
        E = u.map.compose(anchor_inverse)
        E = AffineMap(E.linear, E.shift, 0)
        if radius is not None and np.linalg.norm(E.apply(anchor.map.shift)) > radius:
            continue
        if all(Tile(Word(), E.compose(p.map), p.vertex) in index for p in patch):
            found.append(E)

    found.sort(key=lambda E: tuple(E.shift))
    log("dynamics", f"patch of {len(patch)} tiles: {len(found)} occurrences in {tiling.label}")
    return found


def count_letter_occurrences(letters: str, pattern: str) -> int:
    """Overlapping substring count."""
    if not pattern:
        return 0
    return sum(1 for i in range(len(letters) - len(pattern) + 1) if letters.startswith(pattern, i))


# ============================================================================
# LOCAL RIGIDITY HEURISTIC
# ============================================================================
@dataclass
class RigidityWitness:
    E: AffineMap
    vertex: int
    shared_tiles: int
    coverage: float


@dataclass
class RigidityReport:
    status: str                 # "passes" | "fails" | "inconclusive"
    witnesses: List[RigidityWitness] = field(default_factory=list)
    candidates: int = 0

    @property
    def passes(self) -> str:
        return {"passes": "yes", "fails": "no"}.get(self.status, "inconclusive")


def _rigidity_candidates(t: TIFS, v: int, tiles: List[Tile]) -> List[AffineMap]:
    candidates = []
    for i, w in enumerate(tiles):
        for u in tiles[i + 1:]:
            if u.prototile == w.prototile:
                candidates.append(u.map.compose(w.map.inverse()))
                candidates.append(w.map.compose(u.map.inverse()))

    for j in t.edges_from(v):
        for k in t.edges_from(v):
            if j != k and t.a(j) == t.a(k) and t.head(j) == t.head(k) == v:
                candidates.append(similitude_map(t, j).inverse().compose(similitude_map(t, k)))

    identity = identity_map(t.M)
    unique = []
    for E in candidates:
        E = AffineMap(E.linear, E.shift, 0)
        if E.allclose(identity) or any(E.allclose(other) for other in unique):
            continue
        unique.append(E)
    return unique


def neighbor_map_check(t: TIFS, depth: int = RIGIDITY_DEPTH,
                       tolerance: float = RIGIDITY_TOLERANCE) -> RigidityReport:
    """
    Look for isometries E with T_0 and E.T_0 sharing tiles that tile A ∩ EA.

    A candidate whose shared tiles cover every sampled point of A ∩ EA is a
    witness of failure; partial coverage above one half is inconclusive.
    """
    cloud = attractor_deterministic(t, depth)
    parts = attractor_deterministic(t, depth - 1) if depth > 0 else cloud
    report = RigidityReport("passes")
    partial = False

    for v in t.vertices:
        tiles = list(tiling_of(t, (), v))
        index = TileIndex(tiles)
        component = cloud.component(v)
        for E in _rigidity_candidates(t, v, tiles):
            report.candidates += 1
            shared = [tile for tile in tiles
                      if Tile(Word(), E.compose(tile.map), tile.vertex) in index]
            if not shared:
                continue

            overlap = component[coverage_mask(component, E.apply(component), tolerance)]
            if len(overlap) == 0:
                continue

            shared_cloud = np.concatenate([E.compose(tile.map).apply(parts.component(tile.vertex)) for tile in shared])
            coverage = coverage_fraction(overlap, shared_cloud, tolerance)
            if coverage == 1.0:
                report.witnesses.append(RigidityWitness(E, v, len(shared), coverage))
            elif coverage >= 0.5:
                partial = True

    if report.witnesses:
        report.status = "fails"
    elif partial:
        report.status = "inconclusive"
    log("dynamics", f"rigidity: {report.status} ({report.candidates} candidates, {len(report.witnesses)} witnesses)")
    return report

