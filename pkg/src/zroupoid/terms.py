"""Terms over ``{->, 0}`` plus variables.

Surface syntax (ASCII, with the usual Unicode glyphs accepted as aliases)::

    term  := impl
    impl  := junct ("->" impl)?          right-associative
    junct := post (("^" | "v") post)*    left-associative, equal precedence
    post  := atom "'"*
    atom  := "0" | ident | "(" term ")"

``x'``, ``x ^ y`` and ``x v y`` are sugar; :func:`parse` eliminates them so
that every term is built from :class:`Var`, :class:`Zero` and
:class:`Implies` only.  :func:`parse_lattice` instead keeps ``^``/``v`` as
primitive :class:`Meet`/:class:`Join` nodes for bimagma formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Zero:
    def __repr__(self):
        return "Zero"


@dataclass(frozen=True)
class Implies:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Join:
    left: "Term"
    right: "Term"


Term = Union[Var, Zero, Implies, Meet, Join]
ZERO = Zero()
_BINARY = (Implies, Meet, Join)


def neg(t: Term) -> Implies:
    return Implies(t, ZERO)


def meet(s: Term, t: Term) -> Implies:
    return neg(Implies(s, neg(t)))


def join(s: Term, t: Term) -> Implies:
    return neg(meet(neg(s), neg(t)))


class TermSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<arrow>->|→)
      | (?P<prime>'|′|″|‴)
      | (?P<meet>\^|∧)
      | (?P<join>∨)
      | (?P<open>[(\[{])
      | (?P<close>[)\]}])
      | (?P<zero>0(?![A-Za-z0-9_]))
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    )""",
    re.VERBOSE,
)
_PRIMES = {"'": 1, "′": 1, "″": 2, "‴": 3}
_CLOSER = {"(": ")", "[": "]", "{": "}"}


def _tokenize(text: str):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                out.append(("end", "", len(text)))
                return out
            bad = pos + len(rest) - len(rest.lstrip())
            raise TermSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "ident" and value == "v":
            kind = "join"
        out.append((kind, value, m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, lattice: bool):
        self.text = text
        self.lattice = lattice
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise TermSyntaxError(message, self.text, tok[2])

    def parse(self) -> Term:
        t = self.impl()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return t

    def impl(self) -> Term:
        left = self.junct()
        if self.peek()[0] == "arrow":
            tok = self.take()
            if self.lattice:
                self.fail("'->' not allowed in a lattice term", tok)
            return Implies(left, self.impl())
        return left

    def junct(self) -> Term:
        t = self.post()
        while self.peek()[0] in ("meet", "join"):
            kind = self.take()[0]
            rhs = self.post()
            if self.lattice:
                t = Meet(t, rhs) if kind == "meet" else Join(t, rhs)
            else:
                t = meet(t, rhs) if kind == "meet" else join(t, rhs)
        return t

    def post(self) -> Term:
        t = self.atom()
        while self.peek()[0] == "prime":
            tok = self.take()
            if self.lattice:
                self.fail("prime not allowed in a lattice term", tok)
            for _ in range(_PRIMES[tok[1]]):
                t = neg(t)
        return t

    def atom(self) -> Term:
        tok = self.take()
        kind = tok[0]
        if kind == "zero":
            if self.lattice:
                self.fail("constant 0 not allowed in a lattice term", tok)
            return ZERO
        if kind == "ident":
            return Var(tok[1])
        if kind == "open":
            t = self.impl()
            close = self.take()
            if close[0] != "close" or close[1] != _CLOSER[tok[1]]:
                self.fail(f"expected {_CLOSER[tok[1]]!r}", close)
            return t
        self.fail("expected a term" if kind != "end" else "unexpected end of input", tok)


def parse(text: str) -> Term:
    """Parse and desugar; the result contains only Var, Zero and Implies."""
    return _Parser(text, lattice=False).parse()


def parse_lattice(text: str) -> Term:
    """Parse a term over ``^``/``v`` and variables, keeping Meet/Join nodes."""
    return _Parser(text, lattice=True).parse()


def _is_neg(t) -> bool:
    return isinstance(t, Implies) and isinstance(t.right, Zero)


def _as_meet(t):
    # (s -> t')'  gives  (s, t)
    if _is_neg(t) and isinstance(t.left, Implies) and _is_neg(t.left.right):
        return t.left.left, t.left.right.left
    return None


def _as_join(t):
    # (s' ^ t')'  gives  (s, t)
    if _is_neg(t):
        m = _as_meet(t.left)
        if m and _is_neg(m[0]) and _is_neg(m[1]):
            return m[0].left, m[1].left
    return None


def pretty(t: Term, sugar: bool = False) -> str:
    """Render a term; ``x -> 0`` always prints as ``x'``.

    With ``sugar=True`` meet/join patterns are re-sugared to ``^``/``v``.
    This is display-only: parsing the output gives back the same term.
    """

    def view(t):
        if sugar:
            j = _as_join(t)
            if j:
                return Join(*j)
            m = _as_meet(t)
            if m:
                return Meet(*m)
        return t

    def level(t):
        # 3: atom/postfix, 2: junct, 1: implication
        t = view(t)
        if isinstance(t, (Var, Zero)) or _is_neg(t):
            return 3
        if isinstance(t, (Meet, Join)):
            return 2
        return 1

    def go(t, need):
        s = render(view(t))
        return f"({s})" if level(t) < need else s

    def render(t):
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Zero):
            return "0"
        if _is_neg(t):
            return go(t.left, 3) + "'"
        if isinstance(t, Implies):
            return f"{go(t.left, 2)} -> {go(t.right, 1)}"
        op = " ^ " if isinstance(t, Meet) else " v "
        return go(t.left, 2) + op + go(t.right, 3)

    return render(view(t))


def variables(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, _BINARY):
            stack.append(s.left)
            stack.append(s.right)
    return out


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; unmapped variables stay fixed."""
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, Zero):
        return t
    return type(t)(substitute(t.left, sigma), substitute(t.right, sigma))


def size(t: Term) -> int:
    if isinstance(t, _BINARY):
        return 1 + size(t.left) + size(t.right)
    return 1


def eval_term(t: Term, alg, env: Mapping[str, int]) -> int:
    """Evaluate ``t`` in a FiniteAlgebra under ``env``.

    Meet/Join nodes, if present, use the algebra's derived operations.
    """
    if isinstance(t, Var):
        try:
            v = env[t.name]
        except KeyError:
            raise KeyError(f"unbound variable {t.name!r}") from None
        alg._check(v)
        return v
    if isinstance(t, Zero):
        return alg.zero
    left, right = eval_term(t.left, alg, env), eval_term(t.right, alg, env)
    if isinstance(t, Implies):
        return alg.table[left][right]
    if isinstance(t, Meet):
        return alg.meet(left, right)
    return alg.join(left, right)
