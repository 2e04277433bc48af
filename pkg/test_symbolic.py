"""
test_symbolic.py - Omega_k, split/amalgamate and predecessor blocks
"""

import pytest

from production_config import load_system
from tifs_core import LevelTooSmall, NoPrefixAtLevel, xi, xi_minus
from symbolic_tiling import (
    amalgamate, concatenate_blocks, is_symbolic_tiling, lambda_words, omega,
    omega_counts, omega_table, partition, predecessor_decomposition,
    prototile_letter, split,
)

BIN = load_system("BIN")
FIB = load_system("FIB")
SIER = load_system("SIER")
GD2 = load_system("GD2")

# split is checked up to these levels; |Omega_k| grows like 3^k for SIER
SPLIT_LEVELS = [(BIN, 12), (FIB, 12), (GD2, 12), (SIER, 8)]


def _texts(tiling):
    return [str(w) for w in tiling]


def test_fib_omega_levels():
    assert _texts(omega(FIB, 0)) == ["1", "2"]
    assert _texts(omega(FIB, 1)) == ["11", "12", "2"]
    assert _texts(omega(FIB, 2)) == ["111", "112", "12", "21", "22"]
    assert _texts(omega(FIB, 3)) == ["1111", "1112", "112", "121", "122", "211", "212", "22"]


def test_omega_word_bounds():
    for t, k_max in SPLIT_LEVELS:
        for k in range(min(k_max, 8) + 1):
            tiling = omega(t, k)
            assert is_symbolic_tiling(t, tiling)
            for w in tiling:
                assert xi_minus(t, w) <= k < xi(t, w)


def test_negative_level():
    with pytest.raises(ValueError):
        omega(FIB, -1)


def test_omega_counts():
    counts = omega_counts(FIB, 20)
    assert counts[:2] == [2, 3]
    for k in range(2, 21):
        assert counts[k] == counts[k - 1] + counts[k - 2]
    assert omega_counts(BIN, 16) == [2 ** (k + 1) for k in range(17)]

    for t in (FIB, GD2):
        counts = omega_counts(t, 10)
        assert counts == [len(omega(t, k)) for k in range(11)]
    assert omega_counts(GD2, 6, root=2) == [len(omega(GD2, k, 2)) for k in range(7)]


def test_split_matches_next_level():
    for t, k_max in SPLIT_LEVELS:
        tiling = omega(t, 0)
        for k in range(k_max):
            tiling = split(t, tiling)
            assert tiling.words == omega(t, k + 1).words, (t.name, k + 1)


def test_split_rooted():
    for v in GD2.vertices:
        assert split(GD2, omega(GD2, 3, v)).words == omega(GD2, 4, v).words


def test_amalgamate():
    assert str(amalgamate(FIB, (1, 1, 2), 1)) == "11"
    assert str(amalgamate(FIB, (1, 1, 2), 0)) == "1"
    with pytest.raises(NoPrefixAtLevel):
        amalgamate(FIB, (1, 2), 3)


def test_partition_reassembles():
    for t in (BIN, FIB, GD2):
        blocks = partition(t, 6, 3)
        assert set(blocks) == set(omega(t, 3))
        merged = sorted(w for block in blocks.values() for w in block)
        assert merged == list(omega(t, 6))
        for prefix, block in blocks.items():
            assert block
            assert all(w.symbols[:len(prefix)] == prefix.symbols for w in block)


def test_predecessor_decomposition():
    for t in (BIN, FIB, GD2):
        for l in range(3):
            for k in range(t.a_max + l, 11):
                for root in t.vertices:
                    blocks = predecessor_decomposition(t, k, l, root)
                    assert concatenate_blocks(blocks) == omega(t, k, root).words

    with pytest.raises(LevelTooSmall):
        predecessor_decomposition(FIB, 2, 1)


def test_lambda_words():
    assert [str(w) for w in lambda_words(FIB, 3)] == ["111", "12", "21"]
    assert [str(w) for w in lambda_words(FIB, 4)] == ["1111", "112", "121", "211", "22"]
    assert len(lambda_words(BIN, 5)) == 2 ** 5


def test_prototile_letters():
    assert prototile_letter(FIB, 1, 1) == "l"
    assert prototile_letter(FIB, 1, 2) == "s"
    assert prototile_letter(BIN, 1, 1) == "t"
    assert [prototile_letter(GD2, v, i) for v in (1, 2) for i in (1, 2)] == ["a", "b", "c", "d"]


def test_omega_table():
    assert omega_table(FIB, 1) == ["11 2 l", "12 3 s", "2 2 l"]


if __name__ == "__main__":
    from check_runner import run_checks
    run_checks("SYMBOLIC TILING TESTS", globals())
