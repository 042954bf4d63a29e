"""Naive model counting: materialize every table, filter, count orbits.

Deliberately shares nothing with the backtracking search in
:mod:`zroupoid.enumerate`; it exists to cross-check it for n <= 3.
"""

from __future__ import annotations

import itertools

import numpy as np

from .formulas import VarietySpec, assignment_grid
from .terms import Implies, Var, Zero


def all_tables(n: int) -> np.ndarray:
    """Every n x n table over range(n), shape (n**(n*n), n, n), row-major order."""
    cells = n * n
    idx = np.arange(n ** cells, dtype=np.int64)
    digits = (idx[:, None] // n ** np.arange(cells - 1, -1, -1, dtype=np.int64)) % n
    return digits.reshape(-1, n, n).astype(np.intp)


def _eval_many(t, tables, env, which, shape):
    """Value of ``t`` for each selected table (rows) and assignment (columns)."""
    if isinstance(t, Var):
        return np.broadcast_to(env[t.name], shape)
    if isinstance(t, Zero):
        return np.zeros(shape, dtype=np.intp)
    assert isinstance(t, Implies)
    left = _eval_many(t.left, tables, env, which, shape)
    right = _eval_many(t.right, tables, env, which, shape)
    return tables[which[:, None], left, right]


def satisfying_tables(n: int, v: VarietySpec, chunk: int = 1 << 16) -> np.ndarray:
    """All tables (zero = 0) satisfying every axiom of ``v``."""
    tables = all_tables(n)
    keep = np.ones(len(tables), dtype=bool)
    for eq in v.identities():
        names = sorted(eq.variables())
        env = assignment_grid(names, n)
        width = n ** len(names)
        for lo in range(0, len(tables), chunk):
            which = np.arange(lo, min(lo + chunk, len(tables)))
            which = which[keep[which]]
            if which.size == 0:
                continue
            shape = (which.size, width)
            lhs = _eval_many(eq.lhs, tables, env, which, shape)
            rhs = _eval_many(eq.rhs, tables, env, which, shape)
            keep[which[~np.all(lhs == rhs, axis=1)]] = False
    return tables[keep]


def _orbit(table: np.ndarray) -> set[bytes]:
    n = table.shape[0]
    out = set()
    for rest in itertools.permutations(range(1, n)):
        p = np.array((0,) + rest, dtype=np.intp)
        image = np.empty_like(table)
        image[np.ix_(p, p)] = p[table]
        out.add(image.tobytes())
    return out


def count_models(n: int, v: VarietySpec) -> tuple[int, int]:
    """``(labeled_count, iso_count)`` by brute force."""
    models = satisfying_tables(n, v)
    remaining = {m.tobytes(): m for m in models}
    classes = 0
    while remaining:
        _, table = remaining.popitem()
        for key in _orbit(table):
            remaining.pop(key, None)
        classes += 1
    return len(models), classes
