"""
symbolic_tiling.py - Canonical Symbolic Tilings

Omega_k^(v) = { sigma rooted at v : xi_minus(sigma) <= k < xi(sigma) }
and the structure between levels:

- split:        Omega_k -> Omega_k+1 (keep xi >= k+2, extend xi == k+1)
- amalgamate:   the unique prefix of a word lying in Omega_k
- partition:    Omega_m grouped by their Omega_k prefixes
- predecessors: Omega_k = U_{w in Omega_l} w . Omega_{k - xi(w)}^head(w)
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from tifs_core import (
    TIFS, Word, FORWARD, LevelTooSmall, NoPrefixAtLevel,
    as_symbols, format_word, xi, xi_minus, require_admissible,
)
from production_config import log


@dataclass(frozen=True)
class SymbolicTiling:
    level: int
    root: Optional[int]
    words: Tuple[Word, ...]     # sorted lexicographically

    def __len__(self):
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __contains__(self, w) -> bool:
        return Word(as_symbols(w), FORWARD) in self._word_set()

    def _word_set(self):
        return set(self.words)


def _first_symbols(t: TIFS, root: Optional[int]):
    if root is None:
        return range(1, t.N + 1)
    return t.edges_from(root)


def omega(t: TIFS, k: int, root: Optional[int] = None) -> SymbolicTiling:
    """Depth-first extension of admissible words until xi exceeds k."""
    if k < 0:
        raise ValueError(f"level must be >= 0, got {k}")

    found = []
    stack = [((j,), t.a(j)) for j in _first_symbols(t, root)]
    while stack:
        word, weight = stack.pop()
        if weight > k:
            found.append(word)
            continue
        for j in t.edges_from(t.head(word[-1])):
            stack.append((word + (j,), weight + t.a(j)))

    words = tuple(sorted(Word(w, FORWARD) for w in found))
    log("symbolic", f"Omega_{k} root={root}: {len(words)} words")
    return SymbolicTiling(k, root, words)


def split(t: TIFS, tiling: SymbolicTiling) -> SymbolicTiling:
    k = tiling.level
    words = []
    for w in tiling.words:
        weight = xi(t, w)
        if weight >= k + 2:
            words.append(w)
        else:
            words.extend(w + (j,) for j in t.edges_from(t.head(w.last)))
    return SymbolicTiling(k + 1, tiling.root, tuple(sorted(words)))


def amalgamate(t: TIFS, w, k: int) -> Word:
    """The unique prefix of w in Omega_k."""
    symbols = as_symbols(w)
    weight = 0
    for n, x in enumerate(symbols):
        weight += t.a(x)
        if weight > k:
            return Word(symbols[:n + 1], FORWARD)
    raise NoPrefixAtLevel(f"xi({format_word(symbols)}) = {weight} <= {k}")


def partition(t: TIFS, m: int, k: int, root: Optional[int] = None) -> Dict[Word, Tuple[Word, ...]]:
    """Omega_k word -> block of Omega_m words having it as prefix."""
    if m < k:
        raise ValueError(f"partition needs m >= k, got m={m} k={k}")
    blocks: Dict[Word, List[Word]] = {w: [] for w in omega(t, k, root)}
    for w in omega(t, m, root):
        blocks[amalgamate(t, w, k)].append(w)
    return {w: tuple(block) for w, block in blocks.items()}


def predecessor_decomposition(t: TIFS, k: int, l: int,
                              root: Optional[int] = None) -> Dict[Word, SymbolicTiling]:
    """omega in Omega_l -> Omega_{k - xi(omega)} rooted at head(omega_last)."""
    if k < t.a_max + l:
        raise LevelTooSmall(f"k = {k} < a_max + l = {t.a_max + l}")
    return {w: omega(t, k - xi(t, w), t.head(w.last)) for w in omega(t, l, root)}


def concatenate_blocks(blocks: Dict[Word, SymbolicTiling]) -> Tuple[Word, ...]:
    return tuple(sorted(w + beta for w, rest in blocks.items() for beta in rest))


def lambda_words(t: TIFS, k: int, root: Optional[int] = None) -> Tuple[Word, ...]:
    """Lambda_k^(v) = { sigma : xi(sigma) == k }: one word per copy of T_0 in T_k."""
    found = []
    stack = [((j,), t.a(j)) for j in _first_symbols(t, root)]
    while stack:
        word, weight = stack.pop()
        if weight == k:
            found.append(word)
            continue
        if weight > k:
            continue
        for j in t.edges_from(t.head(word[-1])):
            stack.append((word + (j,), weight + t.a(j)))
    return tuple(sorted(Word(w, FORWARD) for w in found))


def omega_counts(t: TIFS, k_max: int, root: Optional[int] = None) -> List[int]:
    """|Omega_k| for k = 0..k_max, counted without materializing words."""
    # count[v][k]: words rooted at v with xi_minus <= k < xi
    counts = []
    memo: Dict[Tuple[int, int], int] = {}

    def rooted(v, k):
        if (v, k) in memo:
            return memo[(v, k)]
        total = 0
        for j in t.edges_from(v):
            if t.a(j) > k:
                total += 1
            else:
                total += rooted(t.head(j), k - t.a(j))
        memo[(v, k)] = total
        return total

    roots = t.vertices if root is None else (root,)
    for k in range(k_max + 1):
        counts.append(sum(rooted(v, k) for v in roots))
    return counts


def is_symbolic_tiling(t: TIFS, tiling: SymbolicTiling) -> bool:
    """Structural checks on a level-k symbolic tiling."""
    k = tiling.level
    for w in tiling.words:
        require_admissible(t, w, FORWARD)
        if not xi_minus(t, w) <= k < xi(t, w):
            return False
        if tiling.root is not None and t.tail(w.first) != tiling.root:
            return False
    symbols = sorted(w.symbols for w in tiling.words)
    for a, b in zip(symbols, symbols[1:]):
        if b[:len(a)] == a:
            return False
    return True


def prototile_letter(t: TIFS, vertex: int, exponent: int) -> str:
    """l/s for one vertex and two exponents, t for one exponent, else a, b, c, ..."""
    if t.V == 1 and t.a_max == 2:
        return "l" if exponent == 1 else "s"
    if t.V == 1 and t.a_max == 1:
        return "t"
    index = t.vertices.index(vertex) * t.a_max + (exponent - 1)
    return chr(ord("a") + index % 26)


def omega_table(t: TIFS, k: int, root: Optional[int] = None) -> List[str]:
    """Lines 'word xi letter' for the omega subcommand."""
    lines = []
    for w in omega(t, k, root):
        weight = xi(t, w)
        lines.append(f"{w} {weight} {prototile_letter(t, t.head(w.last), weight - k)}")
    return lines
