"""Enumerate finite models of a variety up to isomorphism.

The search fills the ``->`` table cell by cell: ``(0,0)`` first, then the rest
of row 0, column 0, and the remaining cells row-major.  Every axiom instance
(an axiom plus a tuple of values for its variables) is compiled into a short
straight-line program.  An instance that cannot be evaluated yet watches the
first undefined cell it needs and is re-run only when that cell is assigned.

Isomorphism rejection is generate-and-canonicalize with a seen-set; orderly
generation would avoid materializing labeled duplicates but is not needed at
the sizes this is meant for (n <= 5).
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from multiprocessing import get_context
from pathlib import Path

from .algebra import AlgebraError, FiniteAlgebra, save_algebra
from .formulas import Identity, VarietySpec
from .terms import Implies, Var, Zero

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 50_000_000
THREADS_ENV = "ZROUPOID_THREADS"

_OK, _CONFLICT = -1, -2


class BudgetExhausted(Exception):
    pass


# canonical forms


@lru_cache(maxsize=None)
def _zero_fixing_perms(n: int, zero: int) -> tuple[tuple[int, ...], ...]:
    """All bijections old -> new of range(n) that send ``zero`` to 0."""
    others = [a for a in range(n) if a != zero]
    perms = []
    for image in itertools.permutations(range(1, n)):
        p = [0] * n
        for a, b in zip(others, image):
            p[a] = b
        perms.append(tuple(p))
    return tuple(perms)


def _canonical_flat(flat, n: int, zero: int) -> tuple[int, ...]:
    best = None
    for p in _zero_fixing_perms(n, zero):
        inv = [0] * n
        for a, b in enumerate(p):
            inv[b] = a
        cand = tuple(p[flat[inv[i] * n + inv[j]]] for i in range(n) for j in range(n))
        if best is None or cand < best:
            best = cand
    return best


def canonical_form(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Row-major least relabeling among bijections taking the constant to 0."""
    n = alg.size
    flat = [v for row in alg.table for v in row]
    best = _canonical_flat(flat, n, alg.zero)
    return FiniteAlgebra(n, [best[i * n:(i + 1) * n] for i in range(n)], 0)


def is_isomorphic(a: FiniteAlgebra, b: FiniteAlgebra) -> bool:
    if a.size != b.size:
        raise AlgebraError(f"size mismatch: {a.size} vs {b.size}")
    return canonical_form(a) == canonical_form(b)


# compiled axiom instances


class _Program:
    """Straight-line evaluation of both sides of an identity.

    Registers ``0..k-1`` hold variable values, ``k`` holds the constant and
    each op ``(l, r)`` appends ``table[regs[l]][regs[r]]``.
    """

    def __init__(self, eq: Identity):
        self.names = sorted(eq.variables())
        k = len(self.names)
        self.ops: list[tuple[int, int]] = []
        memo: dict = {}

        def comp(t):
            if t in memo:
                return memo[t]
            if isinstance(t, Var):
                reg = self.names.index(t.name)
            elif isinstance(t, Zero):
                reg = k
            elif isinstance(t, Implies):
                left, right = comp(t.left), comp(t.right)
                self.ops.append((left, right))
                reg = k + len(self.ops)
            else:
                raise ValueError("axioms must be desugared to ->, 0 and variables")
            memo[t] = reg
            return reg

        self.lhs = comp(eq.lhs)
        self.rhs = comp(eq.rhs)


def _fill_order(n: int) -> list[int]:
    cells = [(0, 0)] + [(0, j) for j in range(1, n)] + [(i, 0) for i in range(1, n)]
    cells += [(i, j) for i in range(1, n) for j in range(1, n)]
    return [i * n + j for i, j in cells]


class _Search:
    def __init__(self, n: int, axioms, budget: int):
        self.n = n
        self.table = [-1] * (n * n)
        self.watch: list[list[int]] = [[] for _ in range(n * n)]
        self.order = _fill_order(n)
        self.budget = budget
        self.nodes = 0
        self.instances = []
        for eq in axioms:
            prog = _Program(eq)
            for vals in itertools.product(range(n), repeat=len(prog.names)):
                self.instances.append((prog.ops, prog.lhs, prog.rhs, vals))
        self.consistent = self._setup()

    def _run(self, idx: int) -> int:
        ops, lhs, rhs, vals = self.instances[idx]
        regs = [*vals, 0]
        n, table = self.n, self.table
        for left, right in ops:
            cell = regs[left] * n + regs[right]
            v = table[cell]
            if v < 0:
                return cell
            regs.append(v)
        return _OK if regs[lhs] == regs[rhs] else _CONFLICT

    def _setup(self) -> bool:
        for idx in range(len(self.instances)):
            r = self._run(idx)
            if r == _CONFLICT:
                return False
            if r >= 0:
                self.watch[r].append(idx)
        return True

    def assign(self, cell: int, value: int):
        """Set a cell and re-run its watchers; returns an undo record or None."""
        self.table[cell] = value
        pending = self.watch[cell]
        self.watch[cell] = []
        moved: list[int] = []
        for idx in pending:
            r = self._run(idx)
            if r >= 0:
                self.watch[r].append(idx)
                moved.append(r)
            elif r == _CONFLICT:
                self._undo((cell, pending, moved))
                return None
        return (cell, pending, moved)

    def _undo(self, record) -> None:
        cell, pending, moved = record
        for r in reversed(moved):
            self.watch[r].pop()
        self.watch[cell] = pending
        self.table[cell] = -1

    def solve(self, depth: int, stop: int, emit) -> None:
        if depth == stop:
            emit(self.table)
            return
        cell = self.order[depth]
        for v in range(self.n):
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExhausted
            record = self.assign(cell, v)
            if record is not None:
                self.solve(depth + 1, stop, emit)
                self._undo(record)


def accepts(alg: FiniteAlgebra, v: VarietySpec) -> bool:
    """Check-only mode: run the search engine's own checker on a full table.

    The table is first relabeled so that the constant sits at index 0.
    """
    if alg.zero != 0:
        perm = list(range(alg.size))
        perm[0], perm[alg.zero] = alg.zero, 0
        alg = alg.relabel(perm)
    s = _Search(alg.size, v.identities(), budget=alg.size ** 2)
    if not s.consistent:
        return False
    for i, cell in enumerate(s.order):
        if s.assign(cell, alg.table[cell // alg.size][cell % alg.size]) is None:
            return False
    return True


# drivers


@dataclass
class EnumerationReport:
    size: int
    variety: str
    iso_count: int
    labeled_count: int
    nodes_visited: int
    wall_ms: float
    status: str = "complete"  # or "budget_exhausted"
    models: list[FiniteAlgebra] = field(default_factory=list, repr=False)
    labeled: bool = False

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "schema": 1,
            "size": self.size,
            "variety": self.variety,
            "status": self.status,
            "iso_count": self.iso_count,
            "labeled_count": self.labeled_count,
            "nodes_visited": self.nodes_visited,
        }
        if timing:
            out["wall_ms"] = round(self.wall_ms, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _prefixes(n, axioms, budget):
    s = _Search(n, axioms, budget)
    found = []
    exhausted = False
    if s.consistent:
        try:
            s.solve(0, n, lambda t: found.append(tuple(t[:n])))
        except BudgetExhausted:
            exhausted = True
    return found, s.nodes, exhausted


def _subtree(args):
    n, axioms, prefix, budget, keep_labeled = args
    s = _Search(n, axioms, budget)
    order = s.order
    for cell, v in zip(order, prefix):
        if s.assign(cell, v) is None:  # pragma: no cover - prefixes are consistent
            raise RuntimeError("inconsistent prefix replay")
    canon: set = set()
    labeled: list = []
    count = 0

    def emit(table):
        nonlocal count
        count += 1
        flat = tuple(table)
        canon.add(_canonical_flat(flat, n, 0))
        if keep_labeled:
            labeled.append(flat)

    exhausted = False
    try:
        s.solve(n, n * n, emit)
    except BudgetExhausted:
        exhausted = True
    return canon, labeled, count, s.nodes, exhausted


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def enumerate_models(n: int, v: VarietySpec, emit_all_labeled: bool = False,
                     threads: int | None = None, budget: int = DEFAULT_BUDGET) -> EnumerationReport:
    """All n-element models of ``v``, one per isomorphism class.

    The node budget applies to each unit of work (the row-0 split and every
    subtree below a completed row 0), so the outcome does not depend on the
    number of workers.  Exceeding it yields status ``budget_exhausted``.
    """
    if n < 1:
        raise ValueError("size must be at least 1")
    threads = default_threads() if threads is None else max(1, threads)
    start = time.perf_counter()
    axioms = v.identities()
    prefixes, nodes, exhausted = _prefixes(n, axioms, budget)
    tasks = [(n, axioms, p, budget, emit_all_labeled) for p in prefixes]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads, mp_context=get_context("fork")) as pool:
            results = list(pool.map(_subtree, tasks))
    else:
        results = [_subtree(t) for t in tasks]

    canon: set = set()
    labeled: list = []
    count = 0
    for c, lab, k, used, ex in results:
        canon |= c
        labeled.extend(lab)
        count += k
        nodes += used
        exhausted = exhausted or ex
    if nodes > budget:
        exhausted = True

    def build(flat):
        return FiniteAlgebra(n, [flat[i * n:(i + 1) * n] for i in range(n)], 0)

    chosen = sorted(labeled) if emit_all_labeled else sorted(canon)
    report = EnumerationReport(
        size=n,
        variety=v.name,
        iso_count=len(canon),
        labeled_count=count,
        nodes_visited=nodes,
        wall_ms=(time.perf_counter() - start) * 1000,
        status="budget_exhausted" if exhausted else "complete",
        models=[build(f) for f in chosen],
        labeled=emit_all_labeled,
    )
    log.info("enumerated %s n=%d: %d classes, %d labeled, %d nodes",
             v.name, n, report.iso_count, report.labeled_count, nodes)
    return report


def write_report(report: EnumerationReport, outdir) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(report.models))))
    for i, alg in enumerate(report.models, 1):
        save_algebra(alg, outdir / f"{report.variety}_n{report.size}_{i:0{width}d}")
    path = outdir / "report.json"
    path.write_text(report.to_json() + "\n")
    return path
