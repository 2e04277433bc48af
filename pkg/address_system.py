"""
address_system.py - Tile Addresses

Relative addresses (the body word of a tile inside its tiling), absolute
addresses theta.omega with the cancellation rule, and the map
theta.omega -> f_-theta f_omega(A^head(omega_last)).
"""

from dataclasses import dataclass
from typing import List, Optional, Set

from tifs_core import (
    TIFS, Word, FORWARD, REVERSED, EMPTY_WORD_TEXT,
    InadmissibleWord, InvalidAddress, TileNotInContext,
    as_symbols, enumerate_words, format_word, is_admissible, parse_word,
)
from tiling_engine import Tile, Tiling, TileIndex, make_tile, tiling_of
from production_config import log


@dataclass(frozen=True, order=True)
class DottedAddress:
    context: tuple = ()     # reversed word theta
    body: tuple = ()        # forward word omega

    def __str__(self):
        return format_address(self)


def format_address(addr: DottedAddress) -> str:
    return f"{format_word(addr.context)}.{format_word(addr.body)}"


def parse_address(text: str, n_maps: Optional[int] = None) -> DottedAddress:
    """'theta.omega', with ∅ (or nothing) for an empty side."""
    parts = text.strip().split(".")
    if len(parts) != 2:
        raise InvalidAddress(f"address '{text}' must have exactly one '.'")
    try:
        return DottedAddress(parse_word(parts[0], n_maps), parse_word(parts[1], n_maps))
    except InadmissibleWord as e:
        raise InvalidAddress(f"address '{text}': {e}")


def relative_address(t: TIFS, tile: Tile, tiling: Tiling) -> Word:
    """The body word naming tile inside tiling (canonical or Pi(theta))."""
    found = TileIndex(tiling).find(tile)
    if found is None:
        raise TileNotInContext(f"tile {tile.map.describe()} is not in {tiling.label}")
    return found.body


def cancel(theta, omega) -> DottedAddress:
    """
    Remove equal symbols on either side of the dot until they differ or
    the context is empty. The body keeps at least one symbol.
    """
    theta, omega = list(as_symbols(theta)), list(as_symbols(omega))
    while theta and len(omega) > 1 and theta[-1] == omega[0]:
        theta.pop()
        omega.pop(0)
    return DottedAddress(tuple(theta), tuple(omega))


def absolute_addresses(t: TIFS, tile: Tile, theta) -> Set[DottedAddress]:
    """
    theta|l . (relative address in Pi(theta|l)), cancelled, where l is the
    smallest prefix length whose blow-up contains the tile.
    """
    symbols = as_symbols(theta)
    root = t.head(symbols[0]) if symbols else None
    for l in range(len(symbols) + 1):
        prefix = symbols[:l]
        found = TileIndex(tiling_of(t, prefix, root)).find(tile)
        if found is not None:
            addr = cancel(prefix, found.body)
            log("address", f"tile first appears at level {l}: {addr}")
            return {addr}
    raise TileNotInContext(f"tile {tile.map.describe()} is not in Pi({format_word(symbols)})")


def tile_from_absolute(t: TIFS, addr: DottedAddress) -> Tile:
    theta, omega = as_symbols(addr.context), as_symbols(addr.body)
    if not omega:
        raise InvalidAddress(f"{addr}: empty body")
    if not is_admissible(t, theta, REVERSED):
        raise InvalidAddress(f"{addr}: context is not an admissible reversed word")
    if not is_admissible(t, omega, FORWARD):
        raise InvalidAddress(f"{addr}: body is not an admissible forward word")
    if theta and t.tail(omega[0]) != t.tail(theta[-1]):
        raise InvalidAddress(f"{addr}: body root {t.tail(omega[0])} != context vertex {t.tail(theta[-1])}")
    return make_tile(t, theta, omega)


def enumerate_absolute_addresses(t: TIFS, tile: Tile, max_context: int) -> List[DottedAddress]:
    """Every absolute address from contexts theta' with |theta'| <= max_context holding the tile."""
    found = set()
    for length in range(max_context + 1):
        for theta in enumerate_words(t, length, REVERSED):
            if tile in TileIndex(tiling_of(t, theta)):
                found |= absolute_addresses(t, tile, theta)
    return sorted(found)


def relative_text(body) -> str:
    return f"{EMPTY_WORD_TEXT}.{format_word(body)}"
