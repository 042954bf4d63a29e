import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zroupoid.algebra import Bimagma, FiniteAlgebra, derived_bimagma, trivial_algebra
from zroupoid.catalog import catalog, entry, is_subvariety, variety, variety_names
from zroupoid.formulas import (
    Counterexample,
    FormulaSyntaxError,
    Identity,
    UniversalFormula,
    counterexamples,
    holds_identity,
    holds_universal,
    holds_universal_bimagma,
    member_of,
    parse_formula,
    parse_formula_lines,
    premise_count,
    replay,
)
from zroupoid.terms import eval_term, parse

W_FAILURES = [
    {"u": 1, "x": 2, "y": 3, "z": 4},
    {"u": 1, "x": 3, "y": 2, "z": 4},
    {"u": 4, "x": 2, "y": 3, "z": 1},
    {"u": 4, "x": 3, "y": 2, "z": 1},
]


def test_catalog_shapes():
    cat = catalog()
    assert cat["I"] == Identity(parse("(x -> y) -> z"), parse("((z' -> x) -> (y -> z)')'"))
    assert len(cat["M1"].premises) == 1 and len(cat["M1"].conclusions) == 1
    assert len(cat["W"].premises) == 1 and len(cat["W"].conclusions) == 4
    assert entry("L2.3(4)").kind == "imported"
    with pytest.raises(TypeError):
        cat["new"] = cat["I"]
    with pytest.raises(KeyError):
        entry("nope")


def test_catalog_lattice_view():
    lat = catalog(lattice=True)
    assert {"M1", "M2", "J1", "J2", "BR", "W", "LMJD", "JOIN_IDEM"} <= set(lat)
    assert "I" not in lat


def test_varieties():
    assert set(variety_names()) == {"I", "I20", "MC", "S", "MEJ", "ISG"}
    assert [n for n, _ in variety("S").axioms] == ["I", "I0", "I20", "MC"]
    assert is_subvariety("S", "I20") and is_subvariety("S", "I")
    assert not is_subvariety("I20", "MEJ")
    with pytest.raises(KeyError):
        variety("XYZ")


def test_counterexample_algebra_membership(cex7):
    for name in ("I", "I0", "I20", "MC"):
        assert holds_identity(cex7, catalog()[name]) is True
    assert member_of(cex7, variety("I")) is True
    assert member_of(cex7, variety("S")) is True
    res = member_of(cex7, variety("MEJ"))
    assert isinstance(res, Counterexample) and not res


def test_counterexample_algebra_w_failures(cex7):
    w = catalog()["W"]
    res = holds_universal(cex7, w)
    assert isinstance(res, Counterexample)
    assert res.assignment == W_FAILURES[0]
    found = [c.assignment for c in counterexamples(cex7, w)]
    assert found == W_FAILURES
    assert {"x": 2, "y": 3, "z": 1, "u": 4} in found


def test_w_witness_by_hand(cex7):
    # premise 6 <= 6 holds and every disjunct fails
    x, y, z, u = 2, 3, 1, 4
    m = cex7.meet(x, y)
    assert m == 6 and cex7.join(z, u) == 6 and cex7.leq(m, cex7.join(z, u))
    assert cex7.meet(x, 6) == 6 != x
    assert cex7.meet(y, 6) == 6 != y
    assert cex7.meet(6, z) == 1 != 6
    assert cex7.meet(6, u) == 4 != 6


def test_every_reported_failure_replays(cex7):
    for name, f in catalog().items():
        for cex in counterexamples(cex7, f):
            assert replay(cex7, f, cex)


def test_trivial_algebra_satisfies_everything():
    one = trivial_algebra()
    for f in catalog().values():
        assert holds_universal(one, f) is True
    b = derived_bimagma(one)
    for f in catalog(lattice=True).values():
        assert holds_universal_bimagma(b, f) is True


def test_semilattice_is_a_model(semilattice):
    assert member_of(semilattice, variety("I")) is True


def test_broken_constant_fails_i0():
    # 0' = 1 and 1 -> 0 = 1, so 0'' = 1
    alg = FiniteAlgebra(2, [[1, 1], [1, 1]], 0)
    res = member_of(alg, variety("I"))
    assert not res
    assert holds_identity(alg, catalog()["I0"]) is not True


def test_vacuous_premise(cex7):
    f = parse_formula("0 ~ 0' => x ~ y")
    assert cex7.neg(0) != 0
    assert premise_count(cex7, f) == 0
    assert holds_universal(cex7, f) is True


def test_counterexample_is_falsy_and_describes():
    c = Counterexample({"x": 1}, 2, 3, "F")
    assert not c
    assert c.describe() == "F: fails at x=1 (lhs=2, rhs=3)"


def test_formula_text_format():
    fs = parse_formula_lines("# comment\nA : x ~ x\nB : x ~ y, y ~ z => x ~ z\nC : x <= x | x ~ 0\n")
    assert fs["A"] == Identity(parse("x"), parse("x"))
    assert isinstance(fs["B"], UniversalFormula) and fs["B"].is_quasi_identity
    assert len(fs["C"].conclusions) == 2 and not fs["C"].premises
    with pytest.raises(FormulaSyntaxError):
        parse_formula_lines("no colon here")
    with pytest.raises(FormulaSyntaxError):
        parse_formula_lines("A : x -> y")


def test_leq_atom_encoding():
    f = parse_formula("x <= y")
    assert f == Identity(parse("x ^ y"), parse("x"))


def test_bimagma_requires_lattice_formulas():
    b = Bimagma(1, [[0]], [[0]])
    with pytest.raises(ValueError):
        holds_universal_bimagma(b, catalog()["I"])


small_tables = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=n, max_size=n)
    .map(lambda t: FiniteAlgebra(len(t), t, 0))
)


@given(small_tables)
@settings(max_examples=80)
def test_verdict_agrees_with_direct_evaluation(alg):
    for name in ("I", "MC", "MEJ"):
        eq = catalog()[name]
        names = sorted(eq.variables())
        direct = all(
            eval_term(eq.lhs, alg, dict(zip(names, vals))) == eval_term(eq.rhs, alg, dict(zip(names, vals)))
            for vals in itertools.product(range(alg.size), repeat=len(names))
        )
        assert (holds_identity(alg, eq) is True) == direct
