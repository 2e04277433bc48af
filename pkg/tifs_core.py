"""
tifs_core.py - Tiling IFS Core (systems, words, exact-exponent maps)

Defines and validates a tiling iterated function system (TIFS), the
admissible words of its graph, the shift, the xi bookkeeping and the
affine-map algebra with an integer scale exponent.

EDGE CONVENTION:
- each edge e has tail(e) and head(e); f_e maps A^head(e) into A^tail(e)
- forward word sigma:  head(sigma_i) == tail(sigma_i+1)
- reversed word theta: tail(theta_i) == head(theta_i+1)
- pi(sigma) = f_sigma(A^head(sigma_last)),  A^v = U_{tail(e)=v} f_e(A^head(e))
"""

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import reduce
from typing import Dict, List, Optional, Tuple

import numpy as np

from production_config import (
    ORTHOGONALITY_TOLERANCE, MAP_TOLERANCE,
    DIMENSION_RADIUS_TOLERANCE, DIMENSION_BRACKET_LOW, DIMENSION_MAX_ITERATIONS,
    log,
)

FORWARD = "forward"
REVERSED = "reversed"
INVERSE = "inverse"

EMPTY_WORD_TEXT = "∅"


# ============================================================================
# ERRORS
# ============================================================================
class TIFSError(RuntimeError):
    """Base for every failure raised by this package."""


class ConfigError(TIFSError):
    def __init__(self, message, field=""):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class TIFSValidation(TIFSError):
    """A system description that is not a valid TIFS."""

    def __init__(self, message):
        super().__init__(message)
        self.violations = [self]


class GcdNotOne(TIFSValidation):
    pass


class NotStronglyConnected(TIFSValidation):
    pass


class NotOrthogonal(TIFSValidation):
    pass


class NotContractive(TIFSValidation):
    pass


class ComponentsOverlap(TIFSValidation):
    """Warning-level: recorded on the TIFS, never raised by validate_tifs."""


class InadmissibleWord(TIFSError):
    pass


class NoRootInRange(TIFSError):
    pass


class DepthTooLarge(TIFSError):
    pass


class NoPrefixAtLevel(TIFSError):
    pass


class LevelTooSmall(TIFSError):
    pass


class TileNotInContext(TIFSError):
    pass


class InvalidAddress(TIFSError):
    pass


class NotDeflatable(TIFSError):
    pass


class Inconclusive(TIFSError):
    """Search bound exhausted. Never a proof of inequivalence."""


class PrefixTooShort(TIFSError):
    pass


class EmptyPeriod(TIFSError):
    pass


class UnsupportedDimension(TIFSError):
    pass


# ============================================================================
# SYSTEM TYPES
# ============================================================================
@dataclass(frozen=True, eq=False)
class SimilitudeSpec:
    """f_n(x) = s^a O x + q, carried along edge tail -> head."""
    index: int
    a: int
    O: np.ndarray
    q: np.ndarray
    tail: int
    head: int


@dataclass(frozen=True, eq=False)
class TIFS:
    M: int
    s_text: str
    s: float
    maps: Tuple[SimilitudeSpec, ...]
    vertices: Tuple[int, ...]
    name: str = ""
    warnings: Tuple[str, ...] = ()
    _out_edges: Dict[int, Tuple[int, ...]] = field(default=None, init=False, repr=False)
    _in_edges: Dict[int, Tuple[int, ...]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        out_edges = {v: [] for v in self.vertices}
        in_edges = {v: [] for v in self.vertices}
        for m in self.maps:
            out_edges[m.tail].append(m.index)
            in_edges[m.head].append(m.index)
        object.__setattr__(self, "_out_edges", {v: tuple(e) for v, e in out_edges.items()})
        object.__setattr__(self, "_in_edges", {v: tuple(e) for v, e in in_edges.items()})

    @property
    def N(self) -> int:
        return len(self.maps)

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(m.a for m in self.maps)

    @property
    def a_max(self) -> int:
        return max(self.exponents)

    @property
    def contraction(self) -> float:
        """lambda = s^(min a_n)."""
        return self.s ** min(self.exponents)

    def edge(self, e: int) -> SimilitudeSpec:
        return self.maps[e - 1]

    def a(self, e: int) -> int:
        return self.maps[e - 1].a

    def tail(self, e: int) -> int:
        return self.maps[e - 1].tail

    def head(self, e: int) -> int:
        return self.maps[e - 1].head

    def edges_from(self, v: int) -> Tuple[int, ...]:
        """Edges with tail(e) == v: the maps whose images make up A^v."""
        return self._out_edges[v]

    def edges_into(self, v: int) -> Tuple[int, ...]:
        return self._in_edges[v]


# ============================================================================
# WORDS
# ============================================================================
@dataclass(frozen=True, order=True)
class Word:
    symbols: Tuple[int, ...] = ()
    orientation: str = FORWARD

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.symbols[item], self.orientation)
        return self.symbols[item]

    def __add__(self, other):
        return Word(self.symbols + as_symbols(other), self.orientation)

    def __str__(self):
        return format_word(self.symbols)

    @property
    def first(self) -> Optional[int]:
        return self.symbols[0] if self.symbols else None

    @property
    def last(self) -> Optional[int]:
        return self.symbols[-1] if self.symbols else None

    def reversed(self) -> "Word":
        """theta read backwards: a reversed word becomes a forward word."""
        other = FORWARD if self.orientation == REVERSED else REVERSED
        return Word(self.symbols[::-1], other)


def as_symbols(w) -> Tuple[int, ...]:
    """Word, string ("121", "1,12,3", "∅") or int sequence -> tuple of ints."""
    if isinstance(w, Word):
        return w.symbols
    if isinstance(w, str):
        return parse_word(w)
    return tuple(int(x) for x in w)


def forward_word(w) -> Word:
    return Word(as_symbols(w), FORWARD)


def reversed_word(w) -> Word:
    return Word(as_symbols(w), REVERSED)


def parse_word(text: str, n_maps: Optional[int] = None) -> Tuple[int, ...]:
    text = text.strip()
    if text in ("", EMPTY_WORD_TEXT, "-", "empty"):
        return ()
    if "," in text:
        symbols = tuple(int(x) for x in text.split(",") if x.strip())
    else:
        if not text.isdigit():
            raise InadmissibleWord(f"cannot parse word '{text}'")
        if n_maps is not None and n_maps > 9:
            raise InadmissibleWord(f"word '{text}' is ambiguous for {n_maps} maps; use commas")
        symbols = tuple(int(c) for c in text)
    if n_maps is not None:
        for x in symbols:
            if not 1 <= x <= n_maps:
                raise InadmissibleWord(f"symbol {x} outside [1, {n_maps}]")
    return symbols


def format_word(symbols) -> str:
    symbols = as_symbols(symbols)
    if not symbols:
        return EMPTY_WORD_TEXT
    if all(x < 10 for x in symbols):
        return "".join(str(x) for x in symbols)
    return ",".join(str(x) for x in symbols)


def is_admissible(t: TIFS, w, orientation: Optional[str] = None) -> bool:
    if orientation is None:
        orientation = w.orientation if isinstance(w, Word) else FORWARD
    symbols = as_symbols(w)
    if any(not 1 <= x <= t.N for x in symbols):
        return False
    for x, y in zip(symbols, symbols[1:]):
        if orientation == FORWARD and t.head(x) != t.tail(y):
            return False
        if orientation == REVERSED and t.tail(x) != t.head(y):
            return False
    return True


def require_admissible(t: TIFS, w, orientation: str) -> Tuple[int, ...]:
    symbols = as_symbols(w)
    if not is_admissible(t, symbols, orientation):
        raise InadmissibleWord(f"{format_word(symbols)} is not an admissible {orientation} word")
    return symbols


def reverse_word(w) -> Word:
    if isinstance(w, Word):
        return w.reversed()
    return Word(as_symbols(w)[::-1], FORWARD)


def enumerate_words(t: TIFS, length: int, orientation: str = FORWARD,
                    root: Optional[int] = None) -> List[Word]:
    """
    All admissible words of a given length, sorted.

    root keeps forward words with tail(sigma_1) == root, and reversed words
    with tail(theta_last) == root (the vertex their bodies are rooted at).
    """
    words = [()]
    for _ in range(length):
        grown = []
        for w in words:
            if not w:
                candidates = range(1, t.N + 1)
            elif orientation == FORWARD:
                candidates = t.edges_from(t.head(w[-1]))
            else:
                candidates = t.edges_into(t.tail(w[-1]))
            grown.extend(w + (j,) for j in candidates)
        words = grown

    if root is not None and length > 0:
        if orientation == FORWARD:
            words = [w for w in words if t.tail(w[0]) == root]
        else:
            words = [w for w in words if t.tail(w[-1]) == root]
    return sorted(Word(w, orientation) for w in words)


def shift(w, steps: int = 1):
    """S^p: drop p leading symbols (S of a one-symbol word is the empty word)."""
    if isinstance(w, Word):
        return w[steps:]
    return tuple(as_symbols(w)[steps:])


def xi(t: TIFS, w) -> int:
    return sum(t.a(x) for x in as_symbols(w))


def xi_minus(t: TIFS, w) -> int:
    symbols = as_symbols(w)
    return xi(t, symbols[:-1])


def word_distance(theta, psi) -> float:
    """2^-(longest common prefix), 0 when equal. Diagnostic only."""
    a, b = as_symbols(theta), as_symbols(psi)
    if a == b:
        return 0.0
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return 2.0 ** (-n)


# ============================================================================
# AFFINE MAPS (exact integer exponent)
# ============================================================================
@dataclass(frozen=True, eq=False)
class AffineMap:
    """
    x -> linear @ x + shift, with ||linear||_2 == s^exponent by construction.

    provenance (theta, sigma) means f_-theta o f_sigma when known.
    """
    linear: np.ndarray
    shift: np.ndarray
    exponent: int
    provenance: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None

    @property
    def is_isometry(self) -> bool:
        return self.exponent == 0

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            return self.linear @ points + self.shift
        return points @ self.linear.T + self.shift

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        provenance = None
        if self.provenance is not None and other.provenance is not None and not other.provenance[0]:
            provenance = (self.provenance[0], self.provenance[1] + other.provenance[1])
        return AffineMap(
            self.linear @ other.linear,
            self.linear @ other.shift + self.shift,
            self.exponent + other.exponent,
            provenance,
        )

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.shift, -self.exponent)

    def with_provenance(self, theta, sigma) -> "AffineMap":
        return AffineMap(self.linear, self.shift, self.exponent,
                         (as_symbols(theta), as_symbols(sigma)))

    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.linear.ravel(), self.shift])

    def allclose(self, other: "AffineMap", tol: float = MAP_TOLERANCE) -> bool:
        if self.exponent != other.exponent:
            return False
        return bool(np.max(np.abs(self.coefficients() - other.coefficients())) <= tol)

    def describe(self) -> str:
        coeffs = " ".join(format(float(c), ".17g") for c in self.coefficients())
        return f"exp={self.exponent} [{coeffs}]"


IsometryRecord = AffineMap


def identity_map(M: int) -> AffineMap:
    return AffineMap(np.eye(M), np.zeros(M), 0, ((), ()))


def scaling_map(t: TIFS, m: int) -> AffineMap:
    """x -> s^m x."""
    return AffineMap(np.eye(t.M) * t.s ** m, np.zeros(t.M), m)


def similitude_map(t: TIFS, e: int) -> AffineMap:
    spec = t.edge(e)
    return AffineMap(spec.O * t.s ** spec.a, spec.q.copy(), spec.a, ((), (e,)))


def compose(t: TIFS, w, sign: str = FORWARD) -> AffineMap:
    """
    forward: f_w = f_w1 o f_w2 o ... o f_wk, exponent xi(w)
    inverse: f_-w = f_w1^-1 o f_w2^-1 o ... o f_wk^-1, exponent -xi(w)
    """
    symbols = require_admissible(t, w, FORWARD if sign == FORWARD else REVERSED)
    result = identity_map(t.M)
    for x in symbols:
        f = similitude_map(t, x)
        result = result.compose(f if sign == FORWARD else f.inverse())
    if sign == FORWARD:
        return result.with_provenance((), symbols)
    return result.with_provenance(symbols, ())


def inverse_compose(t: TIFS, theta) -> AffineMap:
    """f_-theta for a reversed word theta."""
    return compose(t, theta, INVERSE)


# ============================================================================
# VALIDATION
# ============================================================================
def _parse_real(value, field_name) -> float:
    try:
        return float(Decimal(str(value)))
    except (InvalidOperation, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", field=field_name)


def _parse_system(spec: dict):
    if not isinstance(spec, dict):
        raise ConfigError("system description must be an object")
    for key in ("dimension", "base_ratio", "vertices", "maps"):
        if key not in spec:
            raise ConfigError("missing field", field=key)

    M = spec["dimension"]
    if not isinstance(M, int) or M < 1:
        raise ConfigError(f"expected a positive integer, got {M!r}", field="dimension")

    s_text = str(spec["base_ratio"])
    s = _parse_real(s_text, "base_ratio")

    vertices = spec["vertices"]
    if not isinstance(vertices, list) or not vertices:
        raise ConfigError("expected a nonempty list", field="vertices")
    if len(set(vertices)) != len(vertices):
        raise ConfigError("duplicate vertex ids", field="vertices")

    raw_maps = spec["maps"]
    if not isinstance(raw_maps, list) or len(raw_maps) < 2:
        raise ConfigError("expected a list of at least two maps", field="maps")

    maps = []
    for i, raw in enumerate(raw_maps):
        where = f"maps[{i}]"
        for key in ("a", "O", "q", "tail", "head"):
            if key not in raw:
                raise ConfigError("missing field", field=f"{where}.{key}")
        if "index" in raw and raw["index"] != i + 1:
            raise ConfigError(f"index must be {i + 1}", field=f"{where}.index")
        a = raw["a"]
        if not isinstance(a, int):
            raise ConfigError(f"expected an integer, got {a!r}", field=f"{where}.a")
        O = raw["O"]
        if (not isinstance(O, list) or len(O) != M
                or any(not isinstance(row, list) or len(row) != M for row in O)):
            raise ConfigError(f"expected a {M}x{M} row-major matrix", field=f"{where}.O")
        O = np.array([[_parse_real(x, f"{where}.O[{r}][{c}]") for c, x in enumerate(row)]
                      for r, row in enumerate(O)])
        q = raw["q"]
        if not isinstance(q, list) or len(q) != M:
            raise ConfigError(f"expected a vector of length {M}", field=f"{where}.q")
        q = np.array([_parse_real(x, f"{where}.q[{c}]") for c, x in enumerate(q)])
        for key in ("tail", "head"):
            if raw[key] not in vertices:
                raise ConfigError(f"unknown vertex {raw[key]!r}", field=f"{where}.{key}")
        maps.append(SimilitudeSpec(i + 1, a, O, q, raw["tail"], raw["head"]))

    return M, s_text, s, tuple(maps), tuple(vertices), str(spec.get("name", ""))


def _reachable(start, neighbours) -> set:
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in neighbours(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def check_tifs(spec: dict) -> List[TIFSError]:
    """Every violation of the TIFS definition; empty list when valid."""
    M, s_text, s, maps, vertices, name = _parse_system(spec)
    violations: List[TIFSError] = []

    exponents = [m.a for m in maps]
    if reduce(math.gcd, exponents) != 1:
        violations.append(GcdNotOne(f"gcd of exponents {exponents} is {reduce(math.gcd, exponents)}"))

    succ = {v: [m.head for m in maps if m.tail == v] for v in vertices}
    pred = {v: [m.tail for m in maps if m.head == v] for v in vertices}
    start = vertices[0]
    if (_reachable(start, succ.__getitem__) != set(vertices)
            or _reachable(start, pred.__getitem__) != set(vertices)):
        violations.append(NotStronglyConnected("graph of edges tail -> head is not strongly connected"))

    for m in maps:
        deviation = float(np.max(np.abs(m.O.T @ m.O - np.eye(M))))
        if deviation > ORTHOGONALITY_TOLERANCE:
            violations.append(NotOrthogonal(f"map {m.index}: |O^T O - I| = {deviation:.3g}"))

    if not 0.0 < s < 1.0:
        violations.append(NotContractive(f"base ratio {s_text} is not in (0, 1)"))
    elif any(a < 1 for a in exponents):
        violations.append(NotContractive(f"exponents {exponents} must all be >= 1"))

    return violations


def validate_tifs(spec: dict, diagnose_overlap: bool = True) -> TIFS:
    """
    Build a validated TIFS from a raw description.

    Raises the first violation (with .violations listing all of them).
    Overlapping components only produce a WARN and a note on the TIFS.
    """
    violations = check_tifs(spec)
    if violations:
        for v in violations:
            log("core", f"{type(v).__name__}: {v}", level="ERROR")
        first = violations[0]
        first.violations = violations
        raise first

    M, s_text, s, maps, vertices, name = _parse_system(spec)
    t = TIFS(M, s_text, s, maps, vertices, name)

    if diagnose_overlap and t.V > 1:
        from attractor_geometry import diagnose_overlaps
        notes = tuple(str(w) for w in diagnose_overlaps(t))
        if notes:
            for note in notes:
                log("core", f"ComponentsOverlap: {note}", level="WARN")
            t = TIFS(M, s_text, s, maps, vertices, name, notes)

    log("core", f"OK {name or 'system'}: M={M} s={s_text} N={t.N} V={t.V} a_max={t.a_max}")
    return t


# ============================================================================
# DIMENSION
# ============================================================================
def edge_matrix(t: TIFS, D: float) -> np.ndarray:
    """V_ij s^(D a_j), V_ij = 1 when edge j may follow edge i in a forward word."""
    weights = np.array([t.s ** (D * a) for a in t.exponents])
    follows = np.array([[1.0 if t.head(i) == t.tail(j) else 0.0
                         for j in range(1, t.N + 1)] for i in range(1, t.N + 1)])
    return follows * weights[np.newaxis, :]


def spectral_radius(t: TIFS, D: float) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(edge_matrix(t, D)))))


def hausdorff_dimension_osc(t: TIFS) -> float:
    """
    The D in (0, M] with spectral radius 1, by bisection.

    The radius is strictly decreasing in D; the caller asserts the open set
    condition.
    """
    low, high = DIMENSION_BRACKET_LOW, float(t.M)
    if spectral_radius(t, high) > 1.0 + DIMENSION_RADIUS_TOLERANCE:
        raise NoRootInRange(f"spectral radius exceeds 1 at D = {t.M}")
    if spectral_radius(t, low) < 1.0 - DIMENSION_RADIUS_TOLERANCE:
        raise NoRootInRange(f"spectral radius below 1 at D = {low}")

    if abs(spectral_radius(t, high) - 1.0) <= DIMENSION_RADIUS_TOLERANCE:
        log("core", f"dimension {high:.12f} (ambient)")
        return high

    mid = high
    for _ in range(DIMENSION_MAX_ITERATIONS):
        mid = 0.5 * (low + high)
        radius = spectral_radius(t, mid)
        if abs(radius - 1.0) <= DIMENSION_RADIUS_TOLERANCE:
            break
        if radius > 1.0:
            low = mid
        else:
            high = mid
    log("core", f"dimension {mid:.12f}")
    return mid
