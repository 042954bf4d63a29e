"""Satisfaction of identities and universal Horn-style formulas.

A formula is checked by evaluating both sides over every assignment at once
(numpy arrays indexed by assignment number).  Assignments are ordered with
variables sorted by name and values increasing, the first variable being the
most significant, so the "first" counterexample is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .algebra import Bimagma, FiniteAlgebra
from .terms import (
    Implies,
    Join,
    Meet,
    Term,
    TermSyntaxError,
    Var,
    Zero,
    meet,
    parse,
    parse_lattice,
    pretty,
    variables,
)


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def variables(self) -> set[str]:
        return variables(self.lhs) | variables(self.rhs)

    def __str__(self):
        return f"{pretty(self.lhs)} ~ {pretty(self.rhs)}"


@dataclass(frozen=True)
class UniversalFormula:
    """``p1 & ... & pk  =>  c1 | ... | cm`` with every atom an equation."""

    premises: tuple[Identity, ...]
    conclusions: tuple[Identity, ...]

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "conclusions", tuple(self.conclusions))
        if not self.conclusions:
            raise ValueError("a universal formula needs at least one conclusion")

    @property
    def is_identity(self) -> bool:
        return not self.premises and len(self.conclusions) == 1

    @property
    def is_quasi_identity(self) -> bool:
        return len(self.conclusions) == 1

    def variables(self) -> set[str]:
        out: set[str] = set()
        for eq in self.premises + self.conclusions:
            out |= eq.variables()
        return out

    def __str__(self):
        body = " | ".join(str(c) for c in self.conclusions)
        if not self.premises:
            return body
        return ", ".join(str(p) for p in self.premises) + " => " + body


Formula = Union[Identity, UniversalFormula]


def as_universal(f: Formula) -> UniversalFormula:
    if isinstance(f, Identity):
        return UniversalFormula((), (f,))
    return f


@dataclass(frozen=True)
class Counterexample:
    """A failing assignment.  Falsy, so ``if holds_identity(...)`` reads naturally.

    ``lhs_value``/``rhs_value`` are the values of the first conclusion.
    """

    assignment: dict[str, int]
    lhs_value: int
    rhs_value: int
    formula: str | None = None

    def __bool__(self):
        return False

    def describe(self) -> str:
        env = ", ".join(f"{k}={v}" for k, v in self.assignment.items())
        where = f"{self.formula}: " if self.formula else ""
        return f"{where}fails at {env or '(no variables)'} (lhs={self.lhs_value}, rhs={self.rhs_value})"


@dataclass(frozen=True)
class VarietySpec:
    name: str
    axioms: tuple[tuple[str, Identity], ...]
    parents: tuple[str, ...] = field(default=())

    def identities(self) -> list[Identity]:
        return [eq for _, eq in self.axioms]


# vectorized evaluation


class _Interp:
    """Operation tables a term may refer to; None means unavailable."""

    def __init__(self, size, imp=None, zero=None, meet_t=None, join_t=None):
        self.size = size
        self.imp = imp
        self.zero = zero
        self.meet = meet_t
        self.join = join_t

    @classmethod
    def of(cls, structure) -> "_Interp":
        if isinstance(structure, FiniteAlgebra):
            return cls(structure.size, structure.array, structure.zero,
                       structure.meet_array, structure.join_array)
        if isinstance(structure, Bimagma):
            return cls(structure.size, meet_t=structure.meet_array, join_t=structure.join_array)
        raise TypeError(f"cannot interpret formulas in {type(structure).__name__}")


def _evaluate(t: Term, ops: _Interp, env: dict, count: int, cache: dict) -> np.ndarray:
    hit = cache.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Var):
        out = env[t.name]
    elif isinstance(t, Zero):
        if ops.zero is None:
            raise ValueError("constant 0 is not interpreted in a bimagma")
        out = np.full(count, ops.zero, dtype=np.intp)
    else:
        table = {Implies: ops.imp, Meet: ops.meet, Join: ops.join}[type(t)]
        if table is None:
            raise ValueError(f"{type(t).__name__} is not interpreted in this structure")
        out = table[_evaluate(t.left, ops, env, count, cache), _evaluate(t.right, ops, env, count, cache)]
    cache[t] = out
    return out


def assignment_grid(names: Sequence[str], n: int) -> dict[str, np.ndarray]:
    k = len(names)
    if k == 0:
        return {}
    grid = np.indices((n,) * k, dtype=np.intp).reshape(k, -1)
    return {name: grid[i] for i, name in enumerate(names)}


class _Evaluation:
    """Truth of every premise/conclusion atom under every assignment."""

    def __init__(self, structure, f: UniversalFormula):
        self.ops = _Interp.of(structure)
        self.formula = f
        self.names = sorted(f.variables())
        n = self.ops.size
        self.count = n ** len(self.names)
        env = assignment_grid(self.names, n)
        cache: dict = {}
        self.values = [
            (_evaluate(eq.lhs, self.ops, env, self.count, cache),
             _evaluate(eq.rhs, self.ops, env, self.count, cache))
            for eq in f.premises + f.conclusions
        ]
        k = len(f.premises)
        ok = np.ones(self.count, dtype=bool)
        for lhs, rhs in self.values[:k]:
            ok &= lhs == rhs
        bad = ok
        for lhs, rhs in self.values[k:]:
            bad = bad & (lhs != rhs)
        self.failing = bad
        self.premise_ok = ok

    def counterexample(self, index: int, name=None) -> Counterexample:
        digits = np.unravel_index(index, (self.ops.size,) * len(self.names)) if self.names else ()
        assignment = {v: int(d) for v, d in zip(self.names, digits)}
        lhs, rhs = self.values[len(self.formula.premises)]
        return Counterexample(assignment, int(lhs[index]), int(rhs[index]), name)


def _check(structure, f: Formula, name=None):
    ev = _Evaluation(structure, as_universal(f))
    hits = np.flatnonzero(ev.failing)
    if hits.size == 0:
        return True
    return ev.counterexample(int(hits[0]), name)


def holds_identity(alg: FiniteAlgebra, eq: Identity, name=None):
    """``True`` or the first failing assignment."""
    return _check(alg, eq, name)


def holds_universal(alg: FiniteAlgebra, f: Formula, name=None):
    """``True`` iff every premise-satisfying assignment meets some conclusion."""
    return _check(alg, f, name)


def holds_universal_bimagma(b: Bimagma, f: Formula, name=None):
    """As :func:`holds_universal`, with ``^``/``v`` read off the two tables."""
    return _check(b, f, name)


def counterexamples(structure, f: Formula, name=None) -> Iterator[Counterexample]:
    """Every failing assignment, in assignment order."""
    ev = _Evaluation(structure, as_universal(f))
    for idx in np.flatnonzero(ev.failing):
        yield ev.counterexample(int(idx), name)


def premise_count(structure, f: Formula) -> int:
    """Number of assignments satisfying all premises."""
    return int(_Evaluation(structure, as_universal(f)).premise_ok.sum())


def member_of(alg: FiniteAlgebra, v: VarietySpec):
    for name, eq in v.axioms:
        res = holds_identity(alg, eq, name)
        if res is not True:
            return res
    return True


def replay(structure, f: Formula, cex: Counterexample) -> bool:
    """Re-evaluate a counterexample directly; True if it really fails."""
    f = as_universal(f)
    ops = _Interp.of(structure)
    env = {k: np.array([v], dtype=np.intp) for k, v in cex.assignment.items()}

    def holds(eq):
        cache: dict = {}
        return bool(_evaluate(eq.lhs, ops, env, 1, cache)[0] == _evaluate(eq.rhs, ops, env, 1, cache)[0])

    return all(holds(p) for p in f.premises) and not any(holds(c) for c in f.conclusions)


# formula text format:  name : p1 , p2 => c1 | c2      or      name : lhs ~ rhs


class FormulaSyntaxError(ValueError):
    pass


def _parse_atom(text: str, lattice: bool) -> Identity:
    read = parse_lattice if lattice else parse
    if "<=" in text:
        left, _, right = text.partition("<=")
        s, t = read(left), read(right)
        # s <= t  means  s ^ t = s
        return Identity(Meet(s, t) if lattice else meet(s, t), s)
    left, sep, right = text.partition("~")
    if not sep:
        raise FormulaSyntaxError(f"expected 'lhs ~ rhs' or 'lhs <= rhs', got {text.strip()!r}")
    return Identity(read(left), read(right))


def parse_formula(text: str, lattice: bool = False) -> Formula:
    """Parse a formula body (without the ``name :`` prefix)."""
    if "=>" in text:
        prem_text, _, concl_text = text.partition("=>")
        premises = [_parse_atom(p, lattice) for p in prem_text.split(",") if p.strip()]
        conclusions = [_parse_atom(c, lattice) for c in concl_text.split("|")]
        return UniversalFormula(tuple(premises), tuple(conclusions))
    parts = text.split("|")
    if len(parts) == 1:
        return _parse_atom(text, lattice)
    return UniversalFormula((), tuple(_parse_atom(c, lattice) for c in parts))


def parse_formula_lines(text: str, lattice: bool = False) -> dict[str, Formula]:
    out: dict[str, Formula] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":")
        if not sep or not name.strip():
            raise FormulaSyntaxError(f"line {lineno}: expected 'name : formula'")
        try:
            out[name.strip()] = parse_formula(body, lattice)
        except (TermSyntaxError, FormulaSyntaxError, ValueError) as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc}") from None
    return out


def format_formula(name: str, f: Formula) -> str:
    return f"{name} : {f}"
