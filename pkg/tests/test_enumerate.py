import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zroupoid.algebra import AlgebraError, FiniteAlgebra, load_algebra
from zroupoid.catalog import variety
from zroupoid.enumerate import (
    accepts,
    canonical_form,
    enumerate_models,
    is_isomorphic,
    write_report,
)
from zroupoid.formulas import member_of
from zroupoid.oracle import count_models

# (iso classes, labeled) from the brute-force oracle, frozen
ORACLE_COUNTS = {
    ("I", 1): (1, 1), ("I", 2): (3, 3), ("I", 3): (17, 31),
    ("I20", 2): (2, 2), ("I20", 3): (5, 8),
    ("MEJ", 2): (2, 2), ("MEJ", 3): (13, 23),
    ("MC", 3): (15, 29), ("S", 3): (3, 6), ("ISG", 3): (6, 10),
}


@pytest.mark.parametrize("name,n", [("I", 2), ("I", 3), ("I20", 3), ("MEJ", 3), ("ISG", 3)])
def test_oracle_is_independent_ground_truth(name, n):
    labeled, iso = count_models(n, variety(name))
    assert (iso, labeled) == ORACLE_COUNTS[(name, n)]


@pytest.mark.parametrize("key", sorted(ORACLE_COUNTS))
def test_search_matches_oracle(store, key):
    rep = store.report(*key)
    assert rep.status == "complete"
    assert (rep.iso_count, rep.labeled_count) == ORACLE_COUNTS[key]


def test_size_one():
    rep = enumerate_models(1, variety("I"))
    assert rep.iso_count == 1
    assert rep.models[0].table == ((0,),)


@pytest.mark.parametrize("name", ["I", "I20", "MEJ", "MC", "S", "ISG"])
def test_soundness_and_no_duplicates(store, name):
    for n in (2, 3, 4):
        models = store.report(name, n).models
        canon = {canonical_form(m) for m in models}
        assert len(canon) == len(models)
        for m in models:
            assert member_of(m, variety(name)) is True
            assert canonical_form(m) == m


def test_subvariety_filters_are_monotone(store):
    for n in (2, 3, 4):
        big = set(store.report("I", n).models)
        for small in ("I20", "MEJ", "MC", "S", "ISG"):
            assert set(store.report(small, n).models) <= big
        assert set(store.report("S", n).models) <= set(store.report("I20", n).models)


def test_labeled_models_expand_classes():
    rep = enumerate_models(3, variety("I"), emit_all_labeled=True)
    assert len(rep.models) == rep.labeled_count == 31
    assert len({canonical_form(m) for m in rep.models}) == rep.iso_count


def test_thread_count_does_not_change_results():
    one = enumerate_models(3, variety("I"), threads=1)
    four = enumerate_models(3, variety("I"), threads=4)
    assert one.to_dict(timing=False) == four.to_dict(timing=False)
    assert one.models == four.models


def test_budget_exhaustion_is_reported():
    rep = enumerate_models(4, variety("I"), budget=50)
    assert rep.status == "budget_exhausted"
    assert "budget_exhausted" in rep.to_json()


def test_report_files(tmp_path):
    rep = enumerate_models(2, variety("I"))
    path = write_report(rep, tmp_path)
    data = path.read_text()
    assert '"schema": 1' in data and '"iso_count": 3' in data
    files = sorted(tmp_path.glob("I_n2_*.alg"))
    assert len(files) == 3
    assert [load_algebra(f) for f in files] == rep.models
    assert len(list(tmp_path.glob("I_n2_*.json"))) == 3


def test_canonical_form_of_transposed_counterexample_algebra(cex7):
    swapped = cex7.relabel([0, 2, 1, 3, 4, 5, 6])
    assert swapped != cex7
    assert canonical_form(swapped) == canonical_form(cex7)
    assert is_isomorphic(cex7, swapped)


def test_canonical_form_moves_constant_to_zero():
    # the semilattice with its constant stored at index 1
    alg = FiniteAlgebra(2, [[0, 0], [0, 1]], 1)
    c = canonical_form(alg)
    assert c.zero == 0 and c.table == ((0, 1), (1, 1))


def test_isomorphism_errors_and_negatives(cex7, store):
    with pytest.raises(AlgebraError):
        is_isomorphic(cex7, FiniteAlgebra(1, [[0]], 0))
    models = store.report("I", 3).models
    assert not is_isomorphic(models[0], models[1])
    non_model = FiniteAlgebra(3, [[1, 1, 1], [1, 1, 1], [1, 1, 1]], 0)
    assert all(not is_isomorphic(m, non_model) for m in models)


def test_checker_mode_agrees_with_formula_checker(cex7, store):
    assert accepts(cex7, variety("I")) and accepts(cex7, variety("S"))
    assert not accepts(cex7, variety("MEJ"))
    for t in itertools.product(range(2), repeat=4):
        alg = FiniteAlgebra(2, [t[:2], t[2:]], 0)
        assert accepts(alg, variety("I")) == (member_of(alg, variety("I")) is True)


perm_and_table = st.integers(2, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=n, max_size=n),
    st.permutations(range(1, n)),
))


@given(perm_and_table)
@settings(max_examples=60, deadline=None)
def test_canonical_form_invariants(data):
    table, rest = data
    alg = FiniteAlgebra(len(table), table, 0)
    c = canonical_form(alg)
    assert canonical_form(c) == c
    assert canonical_form(alg.relabel([0, *rest])) == c
