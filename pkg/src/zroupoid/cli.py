"""Command-line entry point.

Exit status: 0 when every check passes, 1 when a mathematical claim fails (or a
search runs out of budget), 2 on usage, parse or IO errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .algebra import AlgebraError, load_algebra
from .catalog import catalog, variety, variety_names
from .claims import run_claims
from .enumerate import DEFAULT_BUDGET, THREADS_ENV, default_threads, enumerate_models, write_report
from .formulas import FormulaSyntaxError, counterexamples, parse_formula
from .proofs import ChainSyntaxError, Session, StepFailure, bundled_chains, parse_chain, verify_chain
from .terms import Meet, TermSyntaxError, Var, parse, parse_lattice, pretty

OK, CLAIM_FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _write_out(args, name: str, payload: dict) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _resolve_formula(token: str):
    cat = catalog()
    if token in cat:
        return token, cat[token]
    if "~" in token or "<=" in token:
        return token, parse_formula(token)
    raise UsageError(f"unknown formula {token!r} (not a catalog name and not an equation)")


# subcommands


def cmd_check(args) -> int:
    alg = load_algebra(args.algebra)
    formulas = [_resolve_formula(tok) for tok in args.formulas]
    results, lines = [], []
    for name, f in formulas:
        fails = list(counterexamples(alg, f))
        if args.limit is not None:
            fails = fails[: args.limit]
        results.append({
            "formula": name,
            "holds": not fails,
            "counterexamples": [
                {"assignment": c.assignment, "lhs": c.lhs_value, "rhs": c.rhs_value} for c in fails
            ],
        })
        lines.append(f"{name}: {'holds' if not fails else f'FAILS ({len(fails)} assignments shown)'}")
        lines += [f"  {c.describe()}" for c in fails]
    payload = {"schema": 1, "algebra": str(args.algebra), "size": alg.size, "results": results}
    _emit(args, payload, "\n".join(lines))
    _write_out(args, "check.json", payload)
    return OK if all(r["holds"] for r in results) else CLAIM_FAILED


def cmd_enumerate(args) -> int:
    if args.n < 1:
        raise UsageError("size must be at least 1")
    v = variety(args.variety)
    report = enumerate_models(args.n, v, emit_all_labeled=args.labeled,
                              threads=args.threads, budget=args.budget)
    if args.out:
        write_report(report, args.out)
    text = (f"{report.variety} n={report.size}: {report.iso_count} classes, "
            f"{report.labeled_count} labeled, {report.nodes_visited} nodes, "
            f"{report.wall_ms:.0f} ms [{report.status}]")
    if args.show:
        text += "\n" + "\n\n".join(m.to_text() for m in report.models)
    _emit(args, report.to_dict(), text)
    return OK if report.status == "complete" else CLAIM_FAILED


def cmd_prove(args) -> int:
    if args.bundled:
        chains = bundled_chains()
    elif args.chains:
        chains = [parse_chain(Path(p).read_text()) for p in args.chains]
    else:
        raise UsageError("give chain files or --bundled")
    session = Session()
    verified, lines = [], []
    failure = None
    for c in chains:
        try:
            reports = verify_chain(c, session)
        except StepFailure as exc:
            failure = {"chain": c.name, "step": exc.index, "message": str(exc)}
            lines.append(f"FAIL {exc}")
            break
        verified.append({"chain": c.name, "steps": [
            {"index": r.index, "position": list(r.position), "rule": r.rule, "direction": r.direction,
             "transfer": r.transfer, "substitution": {k: pretty(t) for k, t in r.substitution.items()}}
            for r in reports]})
        lines.append(f"ok   {c.name} ({len(reports)} steps)")
        if args.steps:
            lines += [f"       {r.describe()}" for r in reports]
    payload = {"schema": 1, "verified": verified, "failure": failure}
    _emit(args, payload, "\n".join(lines))
    _write_out(args, "prove.json", payload)
    return OK if failure is None else CLAIM_FAILED


def cmd_verify_paper(args) -> int:
    if args.max_n < 2:
        raise UsageError("--max-n must be at least 2")
    alg = load_algebra(args.algebra) if args.algebra else None
    report = run_claims(args.max_n, threads=args.threads, budget=args.budget, algebra=alg)
    payload = report.to_dict(timing=not args.no_timing)
    _emit(args, payload, report.to_text())
    _write_out(args, "report.json", payload)
    return OK if report.passed else CLAIM_FAILED


def cmd_parse(args) -> int:
    t = parse_lattice(args.term) if args.lattice else parse(args.term)
    text = pretty(t, sugar=args.sugar) if not args.lattice else _lattice_text(t)
    _emit(args, {"schema": 1, "input": args.term, "term": text, "repr": repr(t)}, text)
    return OK


def _lattice_text(t) -> str:
    if isinstance(t, Var):
        return t.name
    op = "^" if isinstance(t, Meet) else "v"
    return f"({_lattice_text(t.left)} {op} {_lattice_text(t.right)})"


# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes (default: ${THREADS_ENV} or 1)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node ceiling per work unit")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", metavar="DIR", help="write results under DIR")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="zroupoid", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check formulas in an algebra file")
    c.add_argument("algebra")
    c.add_argument("formulas", nargs="+", help="catalog names or equations such as 'x -> x ~ x'")
    c.add_argument("--limit", type=int, default=None, help="report at most this many failures per formula")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("enumerate", parents=[common], help="enumerate models up to isomorphism")
    e.add_argument("n", type=int)
    e.add_argument("variety", choices=variety_names())
    e.add_argument("--labeled", action="store_true", help="emit every labeled model instead of one per class")
    e.add_argument("--show", action="store_true", help="print the tables")
    e.set_defaults(func=cmd_enumerate)

    pr = sub.add_parser("prove", parents=[common], help="verify proof chain files in order")
    pr.add_argument("chains", nargs="*")
    pr.add_argument("--bundled", action="store_true", help="verify the bundled corpus")
    pr.add_argument("--steps", action="store_true", help="print the witness of every step")
    pr.set_defaults(func=cmd_prove)

    vp = sub.add_parser("verify-paper", parents=[common], help="check every bundled claim")
    vp.add_argument("--max-n", type=int, default=3)
    vp.add_argument("--algebra", help="use this table instead of the bundled 7-element one")
    vp.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from JSON")
    vp.set_defaults(func=cmd_verify_paper)

    pa = sub.add_parser("parse", parents=[common], help="parse a term and print it back")
    pa.add_argument("term")
    pa.add_argument("--sugar", action="store_true", help="print meets and joins with ^ and v")
    pa.add_argument("--lattice", action="store_true", help="parse over ^ and v only")
    pa.set_defaults(func=cmd_parse)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is None:
        args.threads = default_threads()
    try:
        return args.func(args)
    except (UsageError, AlgebraError, FormulaSyntaxError, TermSyntaxError, ChainSyntaxError,
            KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
