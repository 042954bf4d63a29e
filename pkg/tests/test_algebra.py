import json

import numpy as np
import pytest

from zroupoid.algebra import (
    AlgebraError,
    FiniteAlgebra,
    derived_bimagma,
    is_associative,
    load_algebra,
    save_algebra,
    trivial_algebra,
)

W_TABLE_ROWS = [
    [5, 5, 5, 5, 5, 5, 5],
    [2, 2, 2, 5, 2, 5, 2],
    [1, 1, 2, 3, 6, 5, 6],
    [4, 6, 2, 3, 4, 5, 6],
    [3, 3, 5, 3, 3, 5, 3],
    [0, 1, 2, 3, 4, 5, 6],
    [6, 6, 2, 3, 6, 5, 6],
]


def test_bundled_table_is_bit_exact(cex7):
    assert cex7.size == 7 and cex7.zero == 0
    assert [list(r) for r in cex7.table] == W_TABLE_ROWS


def test_implies_lookups(cex7):
    assert cex7.implies(2, 3) == 3
    assert cex7.implies(0, 6) == 5
    assert trivial_algebra().implies(0, 0) == 0


def test_negation(cex7):
    assert cex7.neg(0) == 5
    assert cex7.neg(5) == 0
    assert cex7.neg(cex7.neg(cex7.zero)) == cex7.zero


def test_meet_join_leq(cex7):
    assert cex7.meet(2, 3) == 6
    assert cex7.meet(6, 6) == 6
    assert cex7.join(1, 4) == 6
    assert cex7.join(5, 5) == 5
    assert cex7.leq(6, 6)
    assert not cex7.leq(2, 6)
    t = trivial_algebra()
    assert t.meet(0, 0) == t.join(0, 0) == 0


def test_leq_reflexive_where_meet_idempotent(cex7):
    for a in cex7.elements():
        if cex7.meet(a, a) == a:
            assert cex7.leq(a, a)


@pytest.mark.parametrize("bad", [(7, 0), (0, -1), (3, 9)])
def test_out_of_range_elements(cex7, bad):
    with pytest.raises(AlgebraError):
        cex7.implies(*bad)


@pytest.mark.parametrize("table,zero", [
    ([[0, 1], [1]], 0),
    ([[0, 2], [1, 1]], 0),
    ([[0, 1], [1, 1]], 2),
])
def test_invalid_tables(table, zero):
    with pytest.raises(AlgebraError):
        FiniteAlgebra(2, table, zero)


def test_arrays_are_read_only(cex7):
    with pytest.raises(ValueError):
        cex7.array[0, 0] = 1


def test_derived_bimagma(cex7, semilattice):
    b = derived_bimagma(cex7)
    assert b.meet_table[2][3] == 6
    one = derived_bimagma(trivial_algebra())
    assert one.meet_table == one.join_table == ((0,),)
    s = derived_bimagma(semilattice)
    assert s.meet_table == s.join_table == ((0, 1), (1, 1))


def test_text_format_round_trip(cex7, tmp_path):
    text = cex7.to_text()
    assert text.splitlines()[0] == "size 7 zero 0"
    assert text.splitlines()[1].split() == ["5"] * 7
    assert FiniteAlgebra.from_text(text) == cex7
    assert FiniteAlgebra.from_text(cex7.to_json()) == cex7
    alg_path, json_path = save_algebra(cex7, tmp_path / "p")
    assert load_algebra(alg_path) == load_algebra(json_path) == cex7
    assert json.loads(json_path.read_text())["table"] == W_TABLE_ROWS


def test_text_format_errors(tmp_path):
    with pytest.raises(AlgebraError):
        FiniteAlgebra.from_text("size 2 zero 0\n0 1\n")
    with pytest.raises(AlgebraError):
        FiniteAlgebra.from_text("hello")
    with pytest.raises(AlgebraError):
        load_algebra(tmp_path / "missing.alg")


def test_relabel_is_an_isomorphism(cex7):
    perm = [0, 2, 1, 3, 4, 5, 6]
    q = cex7.relabel(perm)
    for a in cex7.elements():
        for b in cex7.elements():
            assert q.implies(perm[a], perm[b]) == perm[cex7.implies(a, b)]


def test_is_associative():
    assert is_associative(np.array([[0, 0], [0, 1]]))  # min
    assert not is_associative(np.array([[1, 0], [0, 0]]))  # nand on {0,1}
