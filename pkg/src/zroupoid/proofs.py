"""Checking equational proof chains by single-position rewriting.

A chain is a list of terms.  Each consecutive pair must differ by replacing
one subterm ``s`` of the current term by ``t`` where ``s ~ t`` is an instance
of the cited rule (or of its reverse, for ``bwd``).  Variables occurring in a
chain are constants: rules quantify over their own variables, hypotheses
and lemmas proved under hypotheses do not.

Chain file format::

    chain NAME in VARIETY
    hyp: term ~ term            (any number; cited as hyp, hyp1, hyp2, ...)
    goal: term ~ term
    1. term
    2. term   [by RULE fwd|bwd]
    3. term   [by RULE fwd transfer]

``transfer`` lets a step use an identity of the involutive subvariety in a
larger variety when both sides have the shape ``(t1 -> t2) -> t3``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator, Sequence

from .algebra import FiniteAlgebra
from .catalog import entry, is_subvariety, variety_names
from .formulas import Identity, UniversalFormula, holds_universal, parse_formula
from .terms import Implies, Term, TermSyntaxError, Var, Zero, parse, pretty, substitute, variables

INVOLUTIVE = "I20"


class ChainSyntaxError(ValueError):
    pass


class StepFailure(Exception):
    """A step that no instance of the cited rule justifies."""

    def __init__(self, message: str, index: int | None = None, chain: str | None = None):
        where = ""
        if chain is not None:
            where += f"{chain}: "
        if index is not None:
            where += f"step {index}: "
        super().__init__(where + message)
        self.index = index
        self.chain = chain
        self.detail = message


@dataclass(frozen=True)
class Justification:
    kind: str  # axiom | lemma | definition | hypothesis | involution
    name: str
    direction: str = "fwd"
    transfer: bool = False

    def __str__(self):
        return f"[by {self.name} {self.direction}{' transfer' if self.transfer else ''}]"


@dataclass(frozen=True)
class ProofChain:
    name: str
    context: str
    hypotheses: tuple[Identity, ...]
    steps: tuple[tuple[Term, Justification | None], ...]
    goal: Identity
    notes: tuple[str, ...] = field(default=(), compare=False)

    def terms(self) -> list[Term]:
        return [t for t, _ in self.steps]

    def constants(self) -> set[str]:
        out = self.goal.variables()
        for h in self.hypotheses:
            out |= h.variables()
        for t in self.terms():
            out |= variables(t)
        return out


@dataclass(frozen=True)
class StepReport:
    index: int
    position: tuple[int, ...]
    rule: str
    direction: str
    substitution: dict
    transfer: bool = False

    def describe(self) -> str:
        sub = ", ".join(f"{k}:={pretty(v)}" for k, v in sorted(self.substitution.items()))
        pos = ".".join(map(str, self.position)) or "root"
        extra = " transfer" if self.transfer else ""
        return f"step {self.index}: {self.rule} {self.direction}{extra} at {pos}" + (f" with {sub}" if sub else "")


# term positions


def positions(t: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Subterms in outermost-leftmost (preorder) order."""
    yield path, t
    if isinstance(t, Implies):
        yield from positions(t.left, path + (0,))
        yield from positions(t.right, path + (1,))


def subterm(t: Term, path: Sequence[int]) -> Term | None:
    for step in path:
        if not isinstance(t, Implies):
            return None
        t = t.left if step == 0 else t.right
    return t


def replace(t: Term, path: Sequence[int], new: Term) -> Term:
    if not path:
        return new
    assert isinstance(t, Implies)
    if path[0] == 0:
        return Implies(replace(t.left, path[1:], new), t.right)
    return Implies(t.left, replace(t.right, path[1:], new))


def match(pattern: Term, t: Term, pvars, sigma: dict) -> dict | None:
    """Extend ``sigma`` so that ``pattern`` instantiates to ``t``, or None."""
    if isinstance(pattern, Var) and pattern.name in pvars:
        bound = sigma.get(pattern.name)
        if bound is None:
            out = dict(sigma)
            out[pattern.name] = t
            return out
        return sigma if bound == t else None
    if isinstance(pattern, (Var, Zero)):
        return sigma if pattern == t else None
    if not isinstance(t, Implies):
        return None
    sigma = match(pattern.left, t.left, pvars, sigma)
    if sigma is None:
        return None
    return match(pattern.right, t.right, pvars, sigma)


def _difference(a: Term, b: Term, path=()) -> tuple[tuple[int, ...], Term, Term]:
    """Innermost position containing every difference between ``a`` and ``b``."""
    if isinstance(a, Implies) and isinstance(b, Implies):
        left_same, right_same = a.left == b.left, a.right == b.right
        if left_same and not right_same:
            return _difference(a.right, b.right, path + (1,))
        if right_same and not left_same:
            return _difference(a.left, b.left, path + (0,))
    return path, a, b


def find_rewrite(current: Term, nxt: Term, src: Term, dst: Term, pvars) -> tuple[tuple[int, ...], dict] | None:
    for path, sub in positions(current):
        other = subterm(nxt, path)
        if other is None:
            continue
        sigma = match(src, sub, pvars, {})
        if sigma is None:
            continue
        sigma = match(dst, other, pvars, sigma)
        if sigma is None:
            continue
        if replace(current, path, other) == nxt:
            return path, sigma
    return None


def _transfer_shape(t: Term) -> bool:
    return isinstance(t, Implies) and isinstance(t.left, Implies)


# rules and sessions


@dataclass(frozen=True)
class _Rule:
    label: str
    eq: Identity
    pvars: frozenset
    home: str | None
    needs: tuple[Identity, ...] = ()


def justification_for(name: str, direction: str = "fwd", transfer: bool = False) -> Justification:
    """Build a justification, inferring its kind from the rule name."""
    if direction not in ("fwd", "bwd"):
        raise ChainSyntaxError(f"direction must be fwd or bwd, not {direction!r}")
    if re.fullmatch(r"hyp\d*", name):
        kind = "hypothesis"
    else:
        try:
            kind = entry(name).kind
        except KeyError:
            kind = "lemma"
        kind = {"imported": "lemma", "proved": "lemma", "law": "lemma"}.get(kind, kind)
    return Justification(kind, name, direction, transfer)


class Session:
    """Chains verified so far, in order; lemmas may only cite earlier ones."""

    def __init__(self):
        self.verified: dict[str, ProofChain] = {}

    def __contains__(self, name):
        return name in self.verified

    def facts(self, chain: ProofChain) -> set[Identity]:
        """Hypotheses of ``chain`` closed under verified conditional lemmas."""
        facts = set(chain.hypotheses)
        changed = True
        while changed:
            changed = False
            for other in self.verified.values():
                if (other.hypotheses and other.goal not in facts
                        and is_subvariety(chain.context, other.context)
                        and all(_known(h, facts) for h in other.hypotheses)):
                    facts.add(other.goal)
                    changed = True
        return facts

    def rule(self, j: Justification, chain: ProofChain) -> _Rule:
        if j.kind == "hypothesis":
            idx = 0 if j.name == "hyp" else int(j.name[3:]) - 1
            if not 0 <= idx < len(chain.hypotheses) or (j.name == "hyp" and len(chain.hypotheses) != 1):
                raise StepFailure(f"{j.name} does not name a hypothesis of this chain")
            return _Rule(j.name, chain.hypotheses[idx], frozenset(), chain.context)
        if j.name in self.verified:
            lemma = self.verified[j.name]
            if lemma.hypotheses:
                return _Rule(j.name, lemma.goal, frozenset(), lemma.context, lemma.hypotheses)
            return _Rule(j.name, lemma.goal, frozenset(lemma.goal.variables()), lemma.context)
        try:
            e = entry(j.name)
        except KeyError:
            raise StepFailure(f"unknown rule {j.name!r} (not in the catalog and not verified earlier)") from None
        if e.kind == "proved":
            raise StepFailure(f"lemma {j.name} must be verified as a chain before it is cited")
        if not isinstance(e.formula, Identity):
            raise StepFailure(f"{j.name} is not an identity and cannot justify a rewrite")
        return _Rule(j.name, e.formula, frozenset(e.formula.variables()), e.home)


def _known(h: Identity, facts) -> bool:
    return h in facts or Identity(h.rhs, h.lhs) in facts


def verify_step(current: Term, nxt: Term, j: Justification | None, hyps: Sequence[Identity] = (),
                context: str = "I", session: Session | None = None, index: int | None = None) -> StepReport:
    """Find the position and substitution licensing ``current -> nxt``.

    Raises :class:`StepFailure` if none exists or the rule is not usable in
    ``context``.
    """
    chain = ProofChain("<step>", context, tuple(hyps), ((current, None), (nxt, j)), Identity(current, nxt))
    return _verify_step(chain, index or 1, current, nxt, j, session or Session(), None)


def _verify_step(chain: ProofChain, index: int, current: Term, nxt: Term, j: Justification | None,
                 session: Session, facts) -> StepReport:
    if j is None:
        raise StepFailure("every step must cite a rule", index, chain.name)
    try:
        rule = session.rule(j, chain)
    except StepFailure as exc:
        raise StepFailure(exc.detail, index, chain.name) from None

    if j.kind != "hypothesis":
        home = rule.home or "I"
        if not is_subvariety(chain.context, home):
            if not j.transfer:
                raise StepFailure(f"{j.name} holds in {home}, not in {chain.context}", index, chain.name)
            if home != INVOLUTIVE or rule.needs:
                raise StepFailure("transfer only lifts unconditional identities of the involutive subvariety",
                                  index, chain.name)
            if not (_transfer_shape(current) and _transfer_shape(nxt)):
                raise StepFailure("transfer needs both sides of the form (t1 -> t2) -> t3", index, chain.name)
    if rule.needs:
        facts = session.facts(chain) if facts is None else facts
        missing = [h for h in rule.needs if not _known(h, facts)]
        if missing:
            raise StepFailure(f"{j.name} needs hypothesis {missing[0]} which is not established here",
                              index, chain.name)

    src, dst = (rule.eq.lhs, rule.eq.rhs) if j.direction == "fwd" else (rule.eq.rhs, rule.eq.lhs)
    found = find_rewrite(current, nxt, src, dst, rule.pvars)
    if found is None:
        path, a, b = _difference(current, nxt)
        pos = ".".join(map(str, path)) or "root"
        raise StepFailure(f"no instance of {j.name} ({j.direction}) rewrites the term; "
                          f"first mismatch at {pos}: {pretty(a)}  vs  {pretty(b)}", index, chain.name)
    path, sigma = found
    return StepReport(index, path, j.name, j.direction, sigma, j.transfer)


def verify_chain(c: ProofChain, session: Session | None = None) -> list[StepReport]:
    """Verify every step in order and record the chain in ``session``."""
    session = Session() if session is None else session
    if c.name in session:
        raise StepFailure("a chain with this name was already verified", None, c.name)
    if c.context not in variety_names():
        raise StepFailure(f"unknown context variety {c.context!r}", None, c.name)
    if len(c.steps) < 2:
        raise StepFailure("a chain needs at least two terms", None, c.name)
    terms = c.terms()
    ends = (terms[0], terms[-1])
    if ends != (c.goal.lhs, c.goal.rhs) and ends != (c.goal.rhs, c.goal.lhs):
        raise StepFailure("chain does not start and end at the two sides of its goal", None, c.name)
    if c.steps[0][1] is not None:
        raise StepFailure("the first term takes no justification", 1, c.name)
    facts = session.facts(c)
    reports = []
    for i in range(1, len(c.steps)):
        term, j = c.steps[i]
        if j is not None and j.name == c.name:
            raise StepFailure("a chain cannot cite itself", i + 1, c.name)
        reports.append(_verify_step(c, i + 1, terms[i - 1], term, j, session, facts))
    session.verified[c.name] = c
    return reports


def replay_step(current: Term, report: StepReport, rule_eq: Identity) -> Term:
    """Apply a recorded rewrite, reproducing the next chain term."""
    dst = rule_eq.rhs if report.direction == "fwd" else rule_eq.lhs
    return replace(current, report.position, substitute(dst, report.substitution))


def rule_identity(name: str, chain: ProofChain, session: Session) -> Identity:
    return session.rule(justification_for(name), chain).eq


def check_chain_semantically(c: ProofChain, models: Sequence[FiniteAlgebra]):
    """All chain terms agree under every hypothesis-satisfying assignment.

    Returns True or the first Counterexample (named after the failing step).
    """
    terms = c.terms()
    for alg in models:
        for i in range(1, len(terms)):
            f = UniversalFormula(c.hypotheses, (Identity(terms[i - 1], terms[i]),))
            res = holds_universal(alg, f, f"{c.name} step {i + 1}")
            if res is not True:
                return res
    return True


# chain files

_HEADER = re.compile(r"chain\s+(\S+)\s+in\s+(\S+)$")
_STEP = re.compile(r"(\d+)[.)]?\s+(.*?)\s*(?:\[by\s+([^\s\]]+)(?:\s+(fwd|bwd))?(\s+transfer)?\s*\])?$")


def parse_chain(text: str) -> ProofChain:
    name = context = goal = None
    hyps: list[Identity] = []
    steps: list[tuple[Term, Justification | None]] = []
    notes: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        if comment.strip():
            notes.append(comment.strip())
        line = line.strip()
        if not line:
            continue
        try:
            if name is None:
                m = _HEADER.fullmatch(line)
                if not m:
                    raise ChainSyntaxError("expected 'chain NAME in VARIETY'")
                name, context = m.groups()
            elif line.startswith("hyp:"):
                hyps.append(_equation(line[4:]))
            elif line.startswith("goal:"):
                goal = _equation(line[5:])
            else:
                m = _STEP.fullmatch(line)
                if not m:
                    raise ChainSyntaxError("expected a numbered step")
                number, term_text, rule, direction, transfer = m.groups()
                if int(number) != len(steps) + 1:
                    raise ChainSyntaxError(f"step numbered {number}, expected {len(steps) + 1}")
                j = justification_for(rule, direction or "fwd", bool(transfer)) if rule else None
                steps.append((parse(term_text), j))
        except (ChainSyntaxError, TermSyntaxError, ValueError) as exc:
            raise ChainSyntaxError(f"line {lineno}: {exc}") from None
    if name is None or goal is None:
        raise ChainSyntaxError("chain needs a header and a goal")
    return ProofChain(name, context, tuple(hyps), tuple(steps), goal, tuple(notes))


def _equation(text: str) -> Identity:
    f = parse_formula(text)
    if not isinstance(f, Identity):
        raise ChainSyntaxError("hypotheses and goals are single equations")
    return f


def format_chain(c: ProofChain) -> str:
    lines = [f"chain {c.name} in {c.context}"]
    lines += [f"hyp: {h}" for h in c.hypotheses]
    lines.append(f"goal: {c.goal}")
    for i, (t, j) in enumerate(c.steps, 1):
        lines.append(f"{i}. {pretty(t)}" + (f"  {j}" if j else ""))
    return "\n".join(lines) + "\n"


def corpus_files() -> list[str]:
    root = resources.files("zroupoid.data.chains")
    order = root.joinpath("ORDER").read_text().split()
    return order


def bundled_chains() -> list[ProofChain]:
    root = resources.files("zroupoid.data.chains")
    return [parse_chain(root.joinpath(f).read_text()) for f in corpus_files()]


def verify_corpus(chains: Sequence[ProofChain] | None = None) -> tuple[Session, dict[str, list[StepReport]]]:
    session = Session()
    chains = bundled_chains() if chains is None else chains
    return session, {c.name: verify_chain(c, session) for c in chains}
