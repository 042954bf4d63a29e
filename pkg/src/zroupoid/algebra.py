"""Finite algebras ``<A, ->, 0>`` stored as operation tables.

Elements are dense integer indices ``0..n-1``.  The distinguished constant is
kept as an explicit field so that permuted or imported algebras round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np


class AlgebraError(ValueError):
    """Malformed table, bad element index or unreadable algebra file."""


def _freeze_table(table, n: int) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(v) for v in row) for row in table)
    if len(rows) != n or any(len(row) != n for row in rows):
        raise AlgebraError(f"table must be {n}x{n}")
    for row in rows:
        for v in row:
            if not 0 <= v < n:
                raise AlgebraError(f"table entry {v} outside carrier of size {n}")
    return rows


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteAlgebra:
    """An n-element algebra with one binary operation and a constant.

    ``table[a][b]`` is ``a -> b``.  Derived meet/join tables are computed
    lazily and cached; their semantics is exactly the defining formulas.
    """

    size: int
    table: tuple[tuple[int, ...], ...]
    zero: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("carrier must be nonempty")
        object.__setattr__(self, "table", _freeze_table(self.table, self.size))
        if not 0 <= self.zero < self.size:
            raise AlgebraError(f"zero {self.zero} outside carrier")

    def _check(self, *elements: int) -> None:
        for a in elements:
            if not 0 <= a < self.size:
                raise AlgebraError(f"element {a} outside carrier of size {self.size}")

    def implies(self, a: int, b: int) -> int:
        self._check(a, b)
        return self.table[a][b]

    def neg(self, a: int) -> int:
        """``a' = a -> 0``."""
        return self.implies(a, self.zero)

    def meet(self, a: int, b: int) -> int:
        """``a ^ b = (a -> b')'``."""
        return self.neg(self.implies(a, self.neg(b)))

    def join(self, a: int, b: int) -> int:
        """``a v b = (a' ^ b')'``."""
        return self.neg(self.meet(self.neg(a), self.neg(b)))

    def leq(self, a: int, b: int) -> bool:
        # a bare relation; only a partial order on involutive algebras
        return self.meet(a, b) == a

    @cached_property
    def array(self) -> np.ndarray:
        return _readonly(np.array(self.table, dtype=np.intp))

    @cached_property
    def neg_array(self) -> np.ndarray:
        return _readonly(self.array[:, self.zero].copy())

    @cached_property
    def meet_array(self) -> np.ndarray:
        t, ng = self.array, self.neg_array
        return _readonly(ng[t[:, ng]])

    @cached_property
    def join_array(self) -> np.ndarray:
        ng = self.neg_array
        return _readonly(ng[self.meet_array[np.ix_(ng, ng)]])

    def elements(self) -> range:
        return range(self.size)

    def relabel(self, perm) -> "FiniteAlgebra":
        """Image under the bijection ``a |-> perm[a]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.size)):
            raise AlgebraError("not a permutation of the carrier")
        new = [[0] * self.size for _ in range(self.size)]
        for a in range(self.size):
            for b in range(self.size):
                new[perm[a]][perm[b]] = perm[self.table[a][b]]
        return FiniteAlgebra(self.size, new, perm[self.zero])

    # serialization

    def to_text(self) -> str:
        lines = [f"size {self.size} zero {self.zero}"]
        lines += [" ".join(str(v) for v in row) for row in self.table]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"size": self.size, "zero": self.zero, "table": [list(r) for r in self.table]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteAlgebra":
        try:
            return cls(int(data["size"]), data["table"], int(data.get("zero", 0)))
        except (KeyError, TypeError) as exc:
            raise AlgebraError(f"bad algebra JSON: {exc}") from None

    @classmethod
    def from_text(cls, text: str) -> "FiniteAlgebra":
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                return cls.from_dict(json.loads(stripped))
            except json.JSONDecodeError as exc:
                raise AlgebraError(f"bad algebra JSON: {exc}") from None
        lines = [ln.split("#", 1)[0].split() for ln in stripped.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise AlgebraError("empty algebra file")
        head = lines[0]
        if len(head) != 4 or head[0] != "size" or head[2] != "zero":
            raise AlgebraError("first line must read 'size N zero Z'")
        try:
            n, z = int(head[1]), int(head[3])
            rows = [[int(v) for v in ln] for ln in lines[1:]]
        except ValueError as exc:
            raise AlgebraError(f"non-integer entry: {exc}") from None
        return cls(n, rows, z)


@dataclass(frozen=True)
class Bimagma:
    """Two binary operations on ``0..n-1`` with no laws assumed."""

    size: int
    meet_table: tuple[tuple[int, ...], ...]
    join_table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("carrier must be nonempty")
        object.__setattr__(self, "meet_table", _freeze_table(self.meet_table, self.size))
        object.__setattr__(self, "join_table", _freeze_table(self.join_table, self.size))

    @cached_property
    def meet_array(self) -> np.ndarray:
        return _readonly(np.array(self.meet_table, dtype=np.intp))

    @cached_property
    def join_array(self) -> np.ndarray:
        return _readonly(np.array(self.join_table, dtype=np.intp))


def derived_bimagma(alg: FiniteAlgebra) -> Bimagma:
    return Bimagma(alg.size, alg.meet_array.tolist(), alg.join_array.tolist())


def is_associative(table) -> bool:
    t = np.asarray(table)
    return bool(np.array_equal(t[t, :], t[:, t]))


def load_algebra(path) -> FiniteAlgebra:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise AlgebraError(f"cannot read {path}: {exc.strerror}") from None
    return FiniteAlgebra.from_text(text)


def save_algebra(alg: FiniteAlgebra, stem) -> tuple[Path, Path]:
    """Write ``stem.alg`` and ``stem.json``; both formats are always emitted."""
    stem = Path(stem)
    text_path, json_path = stem.with_suffix(".alg"), stem.with_suffix(".json")
    text_path.write_text(alg.to_text())
    json_path.write_text(alg.to_json() + "\n")
    return text_path, json_path


def bundled_text(name: str) -> str:
    return resources.files("zroupoid.data").joinpath(name).read_text()


def counterexample_algebra() -> FiniteAlgebra:
    """The bundled 7-element algebra in which Whitman's condition fails."""
    return FiniteAlgebra.from_text(bundled_text("w_counterexample7.alg"))


def trivial_algebra() -> FiniteAlgebra:
    return FiniteAlgebra(1, [[0]], 0)
