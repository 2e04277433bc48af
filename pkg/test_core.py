"""
test_core.py - Systems, words, maps and dimension
"""

import math

import numpy as np
import pytest

from production_config import COMPOSE_TOLERANCE, load_system, load_system_spec
from tifs_core import (
    FORWARD, REVERSED, Word,
    ConfigError, GcdNotOne, InadmissibleWord, NotContractive, NotOrthogonal,
    NotStronglyConnected, TIFSValidation,
    check_tifs, compose, edge_matrix, format_word, hausdorff_dimension_osc,
    identity_map, inverse_compose, is_admissible, parse_word, reverse_word,
    scaling_map, shift, spectral_radius, validate_tifs, word_distance, xi,
    xi_minus, enumerate_words,
)

BIN = load_system("BIN")
FIB = load_system("FIB")
SIER = load_system("SIER")
GD2 = load_system("GD2")

A = (math.sqrt(5) - 1) / 2


def _bin_spec(**changes):
    spec = load_system_spec("BIN")
    spec.update(changes)
    return spec


def test_fixtures_load():
    assert (BIN.M, BIN.N, BIN.V, BIN.a_max) == (1, 2, 1, 1)
    assert (FIB.M, FIB.N, FIB.V, FIB.a_max) == (1, 2, 1, 2)
    assert (SIER.M, SIER.N, SIER.V, SIER.a_max) == (2, 3, 1, 1)
    assert (GD2.M, GD2.N, GD2.V, GD2.a_max) == (1, 3, 2, 2)
    assert GD2.warnings == ()
    assert abs(FIB.s - A) < 1e-15


def test_gcd_violation():
    spec = _bin_spec()
    for m in spec["maps"]:
        m["a"] = 2
    violations = check_tifs(spec)
    assert any(isinstance(v, GcdNotOne) for v in violations)
    with pytest.raises(GcdNotOne) as info:
        validate_tifs(spec)
    assert info.value.violations


def test_orthogonality_and_contraction_violations():
    spec = _bin_spec(base_ratio="1.5")
    spec["maps"][0]["O"] = [[2]]
    kinds = {type(v) for v in check_tifs(spec)}
    assert NotOrthogonal in kinds
    assert NotContractive in kinds
    with pytest.raises(TIFSValidation):
        validate_tifs(spec)


def test_not_strongly_connected():
    spec = {
        "dimension": 1,
        "base_ratio": "0.5",
        "vertices": [1, 2],
        "maps": [
            {"a": 1, "O": [[1]], "q": [0], "tail": 1, "head": 1},
            {"a": 1, "O": [[1]], "q": [0.5], "tail": 1, "head": 2},
        ],
    }
    assert any(isinstance(v, NotStronglyConnected) for v in check_tifs(spec))


def test_config_error_names_field():
    spec = _bin_spec()
    del spec["maps"][1]["O"]
    with pytest.raises(ConfigError) as info:
        validate_tifs(spec)
    assert info.value.field == "maps[1].O"

    with pytest.raises(ConfigError):
        load_system("/nonexistent/system.json")


def test_word_text():
    assert parse_word("121") == (1, 2, 1)
    assert parse_word("∅") == ()
    assert parse_word("1,12", 12) == (1, 12)
    with pytest.raises(InadmissibleWord):
        parse_word("12", 12)
    with pytest.raises(InadmissibleWord):
        parse_word("13", 2)
    assert format_word((1, 12)) == "1,12"
    assert format_word(()) == "∅"
    assert str(Word((2, 1), REVERSED)) == "21"


def test_admissibility_and_reversal():
    assert is_admissible(GD2, (2, 3), FORWARD)
    assert not is_admissible(GD2, (2, 2), FORWARD)
    assert is_admissible(GD2, (3, 2), REVERSED)
    assert not is_admissible(GD2, (3, 3), REVERSED)
    assert Word((1, 2), REVERSED).reversed() == Word((2, 1), FORWARD)
    assert reverse_word((1, 2, 2)).symbols == (2, 2, 1)

    for w in enumerate_words(GD2, 4, REVERSED):
        assert is_admissible(GD2, w, REVERSED)
        assert is_admissible(GD2, w.reversed(), FORWARD)


def test_enumeration_counts():
    assert [str(w) for w in enumerate_words(BIN, 2)] == ["11", "12", "21", "22"]
    assert [w.symbols for w in enumerate_words(FIB, 0)] == [()]
    assert [str(w) for w in enumerate_words(GD2, 2)] == ["11", "12", "23", "31", "32"]

    # admissible words of length k are the entries of F^(k-1), F[i, j] = 1 when j may follow i
    for t, k_max in [(BIN, 12), (FIB, 12), (GD2, 12), (SIER, 9)]:
        follows = edge_matrix(t, 0.0)
        for k in range(1, k_max + 1):
            expected = int(round(np.linalg.matrix_power(follows, k - 1).sum()))
            assert len(enumerate_words(t, k)) == expected, (t.name, k)
            assert len(enumerate_words(t, k, REVERSED)) == expected, (t.name, k)


def test_shift():
    assert shift((1, 2, 1)) == (2, 1)
    assert shift((1,)) == ()
    assert shift(()) == ()
    assert shift((1, 2, 1), 2) == (1,)
    assert shift((1, 2), 5) == ()
    assert shift(Word((2, 1, 1), REVERSED)) == Word((1, 1), REVERSED)


def test_compose_factors_through_shift():
    for t, length in [(GD2, 5), (FIB, 6), (SIER, 4)]:
        for sigma in enumerate_words(t, length):
            whole = compose(t, sigma)
            for k in range(length + 1):
                head, rest = sigma.symbols[:k], shift(sigma.symbols, k)
                parts = compose(t, head).compose(compose(t, rest))
                assert parts.allclose(whole, COMPOSE_TOLERANCE), (t.name, str(sigma), k)


def test_xi_is_additive():
    for w in enumerate_words(GD2, 3):
        for v in enumerate_words(GD2, 2):
            joined = w.symbols + v.symbols
            if is_admissible(GD2, joined, FORWARD):
                assert xi(GD2, joined) == xi(GD2, w) + xi(GD2, v)
    assert xi(FIB, (2, 2) + (1,)) == xi(FIB, (2, 2)) + xi(FIB, (1,))


def test_xi_and_distance():
    assert xi(FIB, (1, 2, 2)) == 5
    assert xi_minus(FIB, (1, 2, 2)) == 3
    assert xi(FIB, ()) == 0
    assert word_distance((1, 2), (1, 3)) == 0.5
    assert word_distance((1, 2), (1, 2)) == 0.0


def test_compose_exponents_and_inverse():
    f = compose(FIB, (1, 2, 1))
    assert f.exponent == xi(FIB, (1, 2, 1))
    assert f.provenance == ((), (1, 2, 1))

    g = inverse_compose(FIB, (1, 2))
    assert g.exponent == -3
    assert g.allclose(compose(FIB, (2, 1)).inverse())
    assert g.compose(compose(FIB, (2, 1))).allclose(identity_map(1))


def test_scaling_map():
    f = scaling_map(BIN, -2)
    assert f.exponent == -2
    assert np.allclose(f.apply(np.array([0.25])), [1.0])
    assert identity_map(2).is_isometry


def test_bin_maps():
    f2 = compose(BIN, (2,))
    assert np.allclose(f2.apply(np.array([[0.0], [1.0]])).ravel(), [0.5, 1.0])


def test_edge_matrix():
    V = edge_matrix(GD2, 1.0)
    assert V.shape == (3, 3)
    # edge 3 may follow edge 2 (head 2 == tail 2), edge 2 may not follow itself
    assert V[1, 2] > 0 and V[1, 1] == 0
    assert spectral_radius(FIB, 0.5) > spectral_radius(FIB, 1.5)


def test_dimension():
    assert abs(hausdorff_dimension_osc(BIN) - 1.0) <= 1e-9
    assert abs(hausdorff_dimension_osc(FIB) - 1.0) <= 1e-6
    assert abs(hausdorff_dimension_osc(SIER) - math.log(3) / math.log(2)) <= 1e-6

    # x + x^3 = 1 with x = 2^-D
    x = [r.real for r in np.roots([1, 0, 1, -1]) if abs(r.imag) < 1e-12][0]
    assert abs(hausdorff_dimension_osc(GD2) + math.log2(x)) <= 1e-6


if __name__ == "__main__":
    from check_runner import run_checks
    run_checks("CORE TESTS", globals())
