"""Batch reproduction of the published results as a table of checkable claims.

Each claim is labeled with the result it reproduces (``T5.3``, ``L2.3``, ...)
and is checked against every enumerated model up to a size bound.  Rows marked
as notes are informational and never affect the overall verdict.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Bimagma, FiniteAlgebra, derived_bimagma, is_associative, counterexample_algebra
from .catalog import catalog, entries, variety
from .enumerate import DEFAULT_BUDGET, EnumerationReport, enumerate_models
from .formulas import (
    Counterexample,
    holds_identity,
    holds_universal,
    holds_universal_bimagma,
    replay,
)
from .oracle import count_models
from .proofs import StepFailure, bundled_chains, check_chain_semantically, verify_corpus

# the failing assignment of W exhibited for the bundled 7-element algebra
W_WITNESS = {"x": 2, "y": 3, "z": 1, "u": 4}
SAMPLE_SIZE = 10_000
SAMPLE_SEED = 20240601
SEMANTIC_MAX_N = 3


class IncompleteEnumeration(RuntimeError):
    pass


class ModelStore:
    """Enumerates models on demand and remembers both reports and models."""

    def __init__(self, threads: int | None = None, budget: int = DEFAULT_BUDGET):
        self.threads = threads
        self.budget = budget
        self._reports: dict[tuple[str, int], EnumerationReport] = {}

    def report(self, name: str, n: int) -> EnumerationReport:
        key = (name, n)
        if key not in self._reports:
            self._reports[key] = enumerate_models(n, variety(name), threads=self.threads, budget=self.budget)
        return self._reports[key]

    def models(self, name: str, max_n: int) -> list[FiniteAlgebra]:
        out = []
        for n in range(1, max_n + 1):
            rep = self.report(name, n)
            if rep.status != "complete":
                raise IncompleteEnumeration(f"{name} n={n}: {rep.status}")
            out.extend(rep.models)
        return out

    def summary(self) -> list[dict]:
        return [self._reports[k].to_dict(timing=False) for k in sorted(self._reports)]


@dataclass
class ClaimResult:
    key: str
    statement: str
    passed: bool
    detail: str = ""
    note: bool = False
    wall_ms: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = {"key": self.key, "statement": self.statement, "passed": self.passed,
               "detail": self.detail, "note": self.note}
        if timing:
            out["wall_ms"] = round(self.wall_ms, 3)
        return out


@dataclass
class ClaimReport:
    max_n: int
    claims: list[ClaimResult]
    enumerations: list[dict] = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims if not c.note)

    def failed(self) -> list[ClaimResult]:
        return [c for c in self.claims if not c.passed and not c.note]

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "schema": 1,
            "max_n": self.max_n,
            "passed": self.passed,
            "claims": [c.to_dict(timing) for c in self.claims],
            "enumerations": self.enumerations,
        }
        if timing:
            out["wall_ms"] = round(self.wall_ms, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def to_text(self) -> str:
        width = max(len(c.key) for c in self.claims)
        lines = []
        for c in self.claims:
            mark = "NOTE" if c.note else ("PASS" if c.passed else "FAIL")
            lines.append(f"{mark:4}  {c.key:<{width}}  {c.statement}")
            if c.detail:
                lines.append(f"      {'':<{width}}  {c.detail}")
        verdict = "all claims hold" if self.passed else f"{len(self.failed())} claim(s) failed"
        lines.append(f"max_n={self.max_n}: {verdict}")
        return "\n".join(lines)


# individual claims; each returns (passed, detail)


def _first_failure(models, names, check) -> tuple[bool, str]:
    for alg in models:
        for name in names:
            res = check(alg, name)
            if res is not True:
                return False, f"size {alg.size} model {alg.table}: {_describe(res, name)}"
    return True, f"{len(models)} models"


def _describe(res, name) -> str:
    if isinstance(res, Counterexample):
        return res.describe()
    return f"{name} fails"


def check_w_counterexample(alg: FiniteAlgebra) -> tuple[bool, str]:
    """The bundled table lies in I and violates W at the recorded assignment."""
    cat = catalog()
    for name in ("I", "I0"):
        res = holds_identity(alg, cat[name], name)
        if res is not True:
            return False, res.describe()
    w = cat["W"]
    if holds_universal(alg, w) is True:
        return False, "W holds"
    if not replay(alg, w, Counterexample(dict(W_WITNESS), 0, 0)):
        return False, "recorded assignment x=2, y=3, z=1, u=4 does not violate W"
    return True, "in I; W fails at x=2, y=3, z=1, u=4"


def check_derived_associative(models) -> tuple[bool, str]:
    for alg in models:
        b = derived_bimagma(alg)
        if not (is_associative(b.meet_array) and is_associative(b.join_array)):
            return False, f"size {alg.size} model {alg.table}: derived operation not associative"
    return True, f"{len(models)} models"


def check_bimagma_laws(models, names) -> tuple[bool, str]:
    lat = catalog(lattice=True)
    bims = [derived_bimagma(m) for m in models]
    for b, alg in zip(bims, models):
        for name in names:
            res = holds_universal_bimagma(b, lat[name], name)
            if res is not True:
                return False, f"size {alg.size} model {alg.table}: {res.describe()}"
    return True, f"{len(models)} models"


def check_identities(models, names) -> tuple[bool, str]:
    cat = catalog()
    return _first_failure(models, names, lambda alg, name: holds_universal(alg, cat[name], name))


def check_equivalent(models, names) -> tuple[bool, str]:
    """Per algebra, the named identities hold all together or not at all."""
    cat = catalog()
    holding = 0
    for alg in models:
        verdicts = {holds_identity(alg, cat[n]) is True for n in names}
        if len(verdicts) > 1:
            return False, f"size {alg.size} model {alg.table}: identities disagree"
        holding += verdicts == {True}
    return True, f"{len(models)} models, {holding} satisfy all"


def check_corpus(models_by_variety: dict[str, list[FiniteAlgebra]]) -> tuple[bool, str]:
    chains = bundled_chains()
    try:
        verify_corpus(chains)
    except StepFailure as exc:
        return False, str(exc)
    for c in chains:
        res = check_chain_semantically(c, models_by_variety[c.context])
        if res is not True:
            return False, res.describe()
    return True, f"{len(chains)} chains"


def check_oracle(store: ModelStore, sizes, names) -> tuple[bool, str]:
    parts = []
    for name in names:
        v = variety(name)
        for n in sizes:
            rep = store.report(name, n)
            labeled, iso = count_models(n, v)
            if (rep.labeled_count, rep.iso_count) != (labeled, iso):
                return False, (f"{name} n={n}: search {rep.labeled_count}/{rep.iso_count}, "
                               f"oracle {labeled}/{iso}")
            parts.append(f"{name} n={n}: {iso} classes, {labeled} labeled")
    return True, "; ".join(parts)


def random_bimagmas(count: int = SAMPLE_SIZE, seed: int = SAMPLE_SEED, sizes=(2, 3)) -> list[Bimagma]:
    """Uniform random pairs of tables; the size is drawn uniformly from ``sizes``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.choice(sizes))
        meet_t = rng.integers(0, n, (n, n))
        join_t = rng.integers(0, n, (n, n))
        out.append(Bimagma(n, meet_t.tolist(), join_t.tolist()))
    return out


def check_distributive_bimagmas(bims) -> tuple[bool, str]:
    lat = catalog(lattice=True)
    hyps = ("LMJD", "JOIN_IDEM")
    applicable = 0
    for b in bims:
        if not all(holds_universal_bimagma(b, lat[h]) is True for h in hyps):
            continue
        applicable += 1
        for name in ("M1", "M2"):
            res = holds_universal_bimagma(b, lat[name], name)
            if res is not True:
                return False, f"meet {b.meet_table} join {b.join_table}: {res.describe()}"
    return True, f"{len(bims)} bimagmas, {applicable} satisfy the hypotheses"


# a 3-element bisemigroup, left mj-distributive and join-idempotent, failing M2
M2_WITNESS = Bimagma(3, ((0, 0, 0), (0, 0, 0), (0, 1, 2)), ((0, 0, 0), (2, 1, 2), (2, 2, 2)))


def check_m2_witness() -> tuple[bool, str]:
    lat = catalog(lattice=True)
    b = M2_WITNESS
    ok = all(holds_universal_bimagma(b, lat[n]) is True
             for n in ("MEET_ASSOC", "JOIN_ASSOC", "LMJD", "JOIN_IDEM", "M1"))
    res = holds_universal_bimagma(b, lat["M2"], "M2")
    if ok and res is not True:
        return True, f"M2 needs right distributivity too: {res.describe()}"
    return False, "witness no longer separates the laws"


# orchestration


def _names(prefix: str) -> list[str]:
    return [k for k in entries() if k.startswith(prefix)]


def run_claims(max_n: int, threads: int | None = None, budget: int = DEFAULT_BUDGET,
               algebra: FiniteAlgebra | None = None, sample_size: int = SAMPLE_SIZE,
               store: ModelStore | None = None) -> ClaimReport:
    """Check every claim on models of size at most ``max_n`` (at least 2)."""
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    start = time.perf_counter()
    store = store or ModelStore(threads, budget)
    alg = counterexample_algebra() if algebra is None else algebra
    semantic_n = min(max_n, SEMANTIC_MAX_N)

    def models(name, bound=max_n):
        return store.models(name, bound)

    plan: list[tuple[str, str, Callable[[], tuple[bool, str]], bool]] = [
        ("W-counterexample", "bundled 7-element algebra is in I and violates W",
         lambda: check_w_counterexample(alg), False),
        ("T1.1", "derived meet and join are associative in I",
         lambda: check_derived_associative(models("I")), False),
        ("T4.2", "M1, M2, J1, J2 hold in I",
         lambda: check_bimagma_laws(models("I"), ("M1", "M2", "J1", "J2")), False),
        ("T5.3", "W holds in MEJ",
         lambda: check_bimagma_laws(models("MEJ"), ("W",)), False),
        ("L2.1", "the four identities are equivalent in I",
         lambda: check_equivalent(models("I"), _names("L2.1")), False),
        ("L2.2", "identities hold in I",
         lambda: check_identities(models("I"), _names("L2.2")), False),
        ("L2.3", "identities hold in I20",
         lambda: check_identities(models("I20"), _names("L2.3")), False),
        ("L3.1", "conditional identities hold in I20",
         lambda: check_identities(models("I20"), _names("L3.1")), False),
        ("L5.1", "identities hold in MEJ",
         lambda: check_identities(models("MEJ"), _names("L5.1")), False),
        ("L5.2", "conditional identities hold in MEJ",
         lambda: check_identities(models("MEJ"), _names("L5.2")), False),
        ("proofs", f"bundled chains verify and are sound on models of size <= {semantic_n}",
         lambda: check_corpus({v: models(v, semantic_n) for v in ("I20", "MEJ")}), False),
        ("oracle", "search counts equal brute-force counts",
         lambda: check_oracle(store, [n for n in (2, 3) if n <= max_n], ("I", "I20", "MEJ")), False),
        ("T6.1", "left mj-distributive, join-idempotent bimagmas satisfy M1 and M2",
         lambda: check_distributive_bimagmas(
             [derived_bimagma(m) for m in models("I")] + random_bimagmas(sample_size)), False),
        ("T6.1-note", "M2 can fail without right distributivity",
         check_m2_witness, True),
    ]
    results = []
    for key, statement, fn, note in plan:
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except IncompleteEnumeration as exc:
            passed, detail = False, f"enumeration incomplete: {exc}"
        results.append(ClaimResult(key, statement, passed, detail, note, (time.perf_counter() - t0) * 1000))
    return ClaimReport(max_n, results, store.summary(), (time.perf_counter() - start) * 1000)
