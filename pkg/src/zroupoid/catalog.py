"""Named formulas and the varieties built from them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

from .algebra import bundled_text
from .formulas import (
    Formula,
    FormulaSyntaxError,
    Identity,
    VarietySpec,
    parse_formula_lines,
)


@dataclass(frozen=True)
class Entry:
    name: str
    formula: Formula
    kind: str  # axiom | involution | definition | imported | proved | law
    home: str | None  # smallest bundled variety known to satisfy it


_KIND = {
    "I": "axiom", "I0": "axiom", "MC": "axiom", "MEJ": "axiom", "ASSOC": "axiom",
    "I20": "involution",
    "neg": "definition", "M": "definition", "J": "definition",
}
_HOME = {
    "I": "I", "I0": "I", "neg": "I", "M": "I", "J": "I",
    "I20": "I20", "MC": "MC", "MEJ": "MEJ", "ASSOC": "ISG",
}


def _classify(name: str) -> tuple[str, str | None]:
    if name in _KIND:
        return _KIND[name], _HOME[name]
    if name.startswith(("L2.1", "L2.3")):
        return "imported", "I20"
    if name.startswith("L2.2"):
        return "imported", "I"
    if name.startswith("L3.1"):
        return "proved", "I20"
    if name.startswith(("L5.1", "L5.2")):
        return "proved", "MEJ"
    return "law", None


@lru_cache(maxsize=None)
def _entries() -> dict[str, Entry]:
    formulas = parse_formula_lines(bundled_text("catalog.txt"))
    return {name: Entry(name, f, *_classify(name)) for name, f in formulas.items()}


@lru_cache(maxsize=None)
def _lattice_formulas() -> dict[str, Formula]:
    out = {}
    for line in bundled_text("catalog.txt").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.update(parse_formula_lines(line, lattice=True))
        except FormulaSyntaxError:
            pass  # mentions -> or 0, so not a bimagma formula
    return out


def catalog(lattice: bool = False) -> MappingProxyType:
    """Immutable map from label to formula.

    With ``lattice=True`` only formulas over ``^``, ``v`` and variables are
    returned, parsed with Meet/Join kept primitive (for bimagmas).
    """
    if lattice:
        return MappingProxyType(_lattice_formulas())
    return MappingProxyType({k: e.formula for k, e in _entries().items()})


def entry(name: str) -> Entry:
    try:
        return _entries()[name]
    except KeyError:
        raise KeyError(f"no catalog entry {name!r}") from None


def entries() -> MappingProxyType:
    return MappingProxyType(_entries())


_VARIETIES = {
    # name: (axioms beyond I, parents)
    "I": ((), ()),
    "I20": (("I20",), ("I",)),
    "MC": (("MC",), ("I",)),
    "S": (("I20", "MC"), ("I20", "MC")),
    "MEJ": (("MEJ",), ("I",)),
    "ISG": (("ASSOC",), ("I",)),
}


def variety(name: str) -> VarietySpec:
    try:
        extra, parents = _VARIETIES[name]
    except KeyError:
        raise KeyError(f"unknown variety {name!r}; known: {', '.join(_VARIETIES)}") from None
    names = ("I", "I0") + extra
    axioms = []
    for n in names:
        f = entry(n).formula
        assert isinstance(f, Identity)
        axioms.append((n, f))
    return VarietySpec(name, tuple(axioms), parents)


def variety_names() -> list[str]:
    return list(_VARIETIES)


def is_subvariety(small: str, big: str) -> bool:
    """True when every algebra of ``small`` is known to lie in ``big``."""
    if small == big:
        return True
    return any(is_subvariety(p, big) for p in _VARIETIES[small][1])
