"""
test_tiling.py - Canonical tilings, blow-ups and their decompositions
"""

import math
import random

import numpy as np
import pytest

from production_config import load_system
from tifs_core import REVERSED, InadmissibleWord, LevelTooSmall, enumerate_words, xi
from symbolic_tiling import omega
from tiling_engine import (
    Tile, Tiling, canonical_tiling, canonical_via_theorem, contains_tile,
    decompose_canonical, interiors_disjoint, is_subtiling, make_tile,
    prototile_set, prototile_threshold, realize_tile, sorted_tiles,
    tile_interval, tiling_letters, tiling_of, tiling_support, tiling_to_text,
    tilings_equal, transform_tiling,
)

BIN = load_system("BIN")
FIB = load_system("FIB")
SIER = load_system("SIER")
GD2 = load_system("GD2")

A = (math.sqrt(5) - 1) / 2

# blow-ups checked against the canonical form for every |theta| up to these lengths
THEOREM_LENGTHS = [(BIN, 6), (FIB, 6), (GD2, 6), (SIER, 4)]


def _intervals(t, tiling):
    return [tile_interval(t, tile) for tile in sorted_tiles(t, tiling)]


def _random_reversed_word(t, rng, length):
    word = [rng.randint(1, t.N)]
    while len(word) < length:
        word.append(rng.choice(t.edges_into(t.tail(word[-1]))))
    return tuple(word)


def test_fib_letters():
    expected = ["ls", "lsl", "lslls", "lsllslsl", "lsllslsllslls"]
    for k, letters in enumerate(expected):
        assert tiling_letters(FIB, canonical_tiling(FIB, k)) == letters


def test_canonical_support_and_size():
    for k in range(8):
        tiling = canonical_tiling(FIB, k)
        assert len(tiling) == len(omega(FIB, k))
        lo, hi = tiling_support(FIB, tiling)
        assert abs(lo) < 1e-9 and abs(hi - A ** -k) < 1e-9
        assert interiors_disjoint(FIB, tiling)

    tiling = canonical_tiling(BIN, 2)
    assert len(tiling) == 8
    assert np.allclose(_intervals(BIN, tiling), [(i / 2, i / 2 + 0.5) for i in range(8)])


def test_blowups_of_bin():
    assert np.allclose(_intervals(BIN, tiling_of(BIN, (1,))),
                       [(0, 0.5), (0.5, 1), (1, 1.5), (1.5, 2)])
    assert tiling_support(BIN, tiling_of(BIN, (2,))) == pytest.approx((-1.0, 1.0))


def test_blowups_of_fib():
    assert tilings_equal(tiling_of(FIB, (1,)), canonical_tiling(FIB, 1))
    assert tiling_letters(FIB, tiling_of(FIB, ())) == "ls"
    with pytest.raises(InadmissibleWord):
        tiling_of(GD2, (3, 3))


def test_blowup_is_isometric_canonical():
    for t, max_length in THEOREM_LENGTHS:
        for length in range(max_length + 1):
            for theta in enumerate_words(t, length, REVERSED):
                E, level, vertex = canonical_via_theorem(t, theta)
                assert E.exponent == 0
                assert level == xi(t, theta)
                expected = transform_tiling(canonical_tiling(t, level, vertex), E)
                assert tilings_equal(expected, tiling_of(t, theta)), (t.name, str(theta))


def test_blowups_are_nested():
    rng = random.Random(1)
    for t in (BIN, FIB, SIER, GD2):
        for _ in range(25):
            theta = _random_reversed_word(t, rng, rng.randint(1, 6))
            previous = tiling_of(t, (), t.head(theta[0]))
            for k in range(1, len(theta) + 1):
                current = tiling_of(t, theta[:k])
                assert is_subtiling(previous, current), (t.name, theta, k)
                previous = current


def test_canonical_via_theorem_values():
    E, level, vertex = canonical_via_theorem(BIN, (2,))
    assert level == 1 and vertex == 1
    assert np.allclose(E.apply(np.array([0.0, 1.0]).reshape(2, 1)).ravel(), [-1.0, 0.0])

    E, level, _ = canonical_via_theorem(FIB, (1,))
    assert level == 1
    assert np.allclose(E.linear, [[1.0]]) and np.allclose(E.shift, [0.0])


def test_prototiles():
    assert [c.letter for c in prototile_set(FIB)] == ["l", "s"]
    assert len(prototile_set(BIN)) == 1
    assert len(prototile_set(GD2)) == 4

    # representative clouds span s^i [0, 1]
    for cls, width in zip(prototile_set(FIB), (A, A * A)):
        cloud = cls.realize(FIB, 12)
        assert cloud.shape == (2 ** 12, 1)
        assert cloud.min() == pytest.approx(0.0, abs=1e-12)
        assert width - 1e-4 <= cloud.max() <= width + 1e-12

    k, reachable = prototile_threshold(FIB, 6)
    assert k == 0 and reachable == {(1, 1), (1, 2)}
    k, reachable = prototile_threshold(GD2, 6)
    assert k == 0 and reachable == {(1, 1), (2, 1), (1, 2)}


def test_decompose_bin():
    blocks = decompose_canonical(BIN, 2, 0)
    assert [str(b.word) for b in blocks] == ["1", "2"]
    assert all(b.level == 1 and b.isometry.exponent == 0 for b in blocks)
    assert np.allclose([b.isometry.shift[0] for b in blocks], [0.0, 2.0])


def test_decompose_reassembles():
    for t, k, l in [(BIN, 5, 1), (FIB, 6, 1), (FIB, 7, 3), (GD2, 6, 2)]:
        for root in t.vertices:
            whole = canonical_tiling(t, k, root)
            tiles = []
            for block in decompose_canonical(t, k, l, root):
                tiles.extend(transform_tiling(canonical_tiling(t, block.level, block.vertex), block.isometry))
            assert tilings_equal(Tiling(tuple(tiles), k, root), whole)

    with pytest.raises(LevelTooSmall):
        decompose_canonical(FIB, 2, 1)


def test_tile_identity():
    t3 = canonical_tiling(FIB, 3)
    # f_1 = s x, so the canonical FIB tilings are nested
    assert is_subtiling(canonical_tiling(FIB, 2), t3)
    assert not is_subtiling(canonical_tiling(BIN, 3), canonical_tiling(BIN, 2))
    assert contains_tile(t3, t3.tiles[0])
    moved = transform_tiling(t3, canonical_via_theorem(BIN, (2,))[0])
    assert not tilings_equal(moved, t3)


def test_tiling_text():
    lines = tiling_to_text(FIB, canonical_tiling(FIB, 1)).splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("T_1 11 l 1 1 ")
    assert lines[1].startswith("T_1 12 s 1 2 ")
    assert tiling_to_text(FIB, Tiling((), 0)) == ""


def test_realize_tile():
    tile = make_tile(BIN, (1,), (2, 1))
    cloud = realize_tile(BIN, tile, 8)
    assert cloud.min() >= 1.0 - 1e-12 and cloud.max() <= 1.5 + 1e-12
    assert tile_interval(BIN, tile) == pytest.approx((1.0, 1.5))
    assert isinstance(tile, Tile) and tile.prototile == (1, 1)

    with pytest.raises(InadmissibleWord):
        make_tile(BIN, (1,), ())


def test_interiors_disjoint():
    assert interiors_disjoint(FIB, canonical_tiling(FIB, 4))
    assert interiors_disjoint(BIN, tiling_of(BIN, (2, 1)))
    assert interiors_disjoint(GD2, canonical_tiling(GD2, 5, 1))


if __name__ == "__main__":
    from check_runner import run_checks
    run_checks("TILING ENGINE TESTS", globals())
