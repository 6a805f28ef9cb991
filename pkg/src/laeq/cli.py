"""Command-line interface.

Exit codes: 0 positive answer, 1 negative answer, 2 input error, 3 search budget exhausted.
Theory files hold one implication per line; ``#`` starts a comment.  Node
justifications in forest files and axiom numbers in rule-proof files refer
to the basic theory printed by ``laeq basify``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .degrees import format_degree
from .engine import entailment_degree
from .forest import ForestError, format_forest, parse_forest, render_forest, verify_forest
from .normalize import NormalizationError, normalize_forest, parse_pass
from .parser import ParseError, parse_formula, parse_implication, parse_query, parse_theory
from .rules import check_rule_proof, parse_rule_proof, rule_proof_to_forest
from .semantics import (SearchBudgetExceeded, evaluate, find_countermodel, format_space, hausdorff, parse_space,
                        validate_space)
from .syntax import GradedImplication, flatten, is_tautology, to_basic_theory

OK, NEGATIVE, INPUT_ERROR, BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text)


def _theory(path: str):
    theory = parse_theory(_read(path))
    return theory, to_basic_theory(theory)


class _Output:
    """Collects a text rendering and a JSON payload; prints one of them."""

    def __init__(self, as_json: bool, out):
        self.as_json = as_json
        self.out = out
        self.data: dict = {}

    def line(self, text: str = ""):
        if not self.as_json:
            print(text, file=self.out)

    def error(self, text: str):
        if not self.as_json:
            print(text, file=sys.stderr)

    def set(self, **kw):
        self.data.update(kw)

    def flush(self):
        if self.as_json:
            print(json.dumps(self.data, indent=2, sort_keys=True), file=self.out)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_prove(args, o: _Output) -> int:
    _, tb = _theory(args.theory)
    query = parse_query(args.goal)
    res = entailment_degree(tb, query.antecedent, query.consequent, budget=args.budget)
    o.set(command="prove", provable=res.provable, degree=format_degree(res.degree) if res.provable else None)
    if not res.provable:
        o.line("NOT PROVABLE" if query.degree is None else f"NOT PROVABLE AT {format_degree(query.degree)}")
        o.set(answer=False)
        return NEGATIVE
    goal = GradedImplication(query.antecedent, query.consequent, res.degree)
    forest_text = format_forest(res.forest, goal)
    if query.degree is None:
        o.line(f"minimal degree = {format_degree(res.degree)}")
        answer = True
    else:
        answer = res.degree <= query.degree
        verdict = "PROVABLE" if answer else "NOT PROVABLE"
        o.line(f"{verdict} AT {format_degree(query.degree)} (minimal degree = {format_degree(res.degree)})")
    o.set(answer=answer, forest=forest_text)
    if args.output:
        _write(args.output, forest_text, o.out)
        o.line(f"forest written to {args.output}")
    elif not o.as_json:
        o.line()
        o.out.write(forest_text)
    if args.tree:
        o.line()
        o.line(render_forest(res.forest).rstrip("\n"))
    return OK if answer else NEGATIVE


def _report_violations(o: _Output, violations):
    o.set(violations=[{"node": v.node, "tag": v.tag, "message": v.message} for v in violations])
    for v in violations:
        o.line(str(v))


def cmd_check_forest(args, o: _Output) -> int:
    _, tb = _theory(args.theory)
    ff = parse_forest(_read(args.forest))
    goal = parse_implication(args.goal) if args.goal else ff.goal
    if goal is None:
        raise InputError("no goal: pass --goal or put a 'goal:' header in the forest file")
    if args.any_clause_set:
        report = verify_forest(ff.forest, tb, goal, ff.b_zeta, ff.b_eta)
    else:
        report = verify_forest(ff.forest, tb, goal)
    o.set(command="check-forest", ok=report.ok, length=format_degree(report.length), goal=str(goal))
    o.line(f"{'OK' if report.ok else 'INVALID'}: length {format_degree(report.length)} for {goal}")
    _report_violations(o, report.violations)
    return OK if report.ok else NEGATIVE


def cmd_check_proof(args, o: _Output) -> int:
    _, tb = _theory(args.theory)
    proof = parse_rule_proof(_read(args.proof))
    report = check_rule_proof(proof, flatten(tb), r5_prime=args.r5_prime)
    o.set(command="check-proof", ok=report.ok, steps=len(proof),
          conclusion=str(report.conclusion) if report.conclusion else None,
          violations=[{"step": v.index, "message": v.message} for v in report.violations])
    head = f"{'OK' if report.ok else 'INVALID'}: {len(proof)} steps"
    o.line(head + (f", concludes {report.conclusion}" if report.ok and report.conclusion else ""))
    for v in report.violations:
        o.line(str(v))
    if not report.ok:
        return NEGATIVE
    if args.to_forest is not None:
        if args.r5_prime:
            raise InputError("--to-forest needs a proof in the calculus with R3 and R5")
        forest = rule_proof_to_forest(proof, tb)
        vr = verify_forest(forest, tb, report.conclusion)
        text = format_forest(forest, report.conclusion)
        o.set(forest=text, forest_ok=vr.ok)
        if args.to_forest != "-" or not o.as_json:
            _write(args.to_forest, text, o.out)
        o.line(f"forest {'verifies' if vr.ok else 'FAILS'} with length {format_degree(vr.length)}")
        if not vr.ok:
            return NEGATIVE
    return OK


def cmd_countermodel(args, o: _Output) -> int:
    theory, _ = _theory(args.theory)
    goal = parse_implication(args.goal)
    model = find_countermodel(theory, goal, max_worlds=args.max_worlds, budget=args.budget)
    o.set(command="countermodel", found=model is not None)
    if model is None:
        o.line(f"no countermodel with at most {args.max_worlds} worlds")
        return NEGATIVE
    text = format_space(model)
    o.set(space=text)
    if args.output:
        _write(args.output, text, o.out)
        o.line(f"countermodel with {len(model.space.worlds)} worlds written to {args.output}")
    elif not o.as_json:
        o.out.write(text)
    return OK


def cmd_eval(args, o: _Output) -> int:
    model = parse_space(_read(args.space))
    query = parse_query(args.implication)
    a = evaluate(model, query.antecedent)
    b = evaluate(model, query.consequent)
    h = hausdorff(model.space, a, b)
    worlds = model.space.worlds
    o.set(command="eval", distance=format_degree(h), antecedent=[w for w in worlds if w in a],
          consequent=[w for w in worlds if w in b])
    if query.degree is None:
        o.line(f"distance = {format_degree(h)}")
        return OK
    sat = h <= query.degree
    o.set(satisfied=sat)
    o.line(f"{'SAT' if sat else 'UNSAT'} (distance = {format_degree(h)})")
    return OK if sat else NEGATIVE


def cmd_normalize(args, o: _Output) -> int:
    _, tb = _theory(args.theory)
    ff = parse_forest(_read(args.forest))
    goal = parse_implication(args.goal) if args.goal else ff.goal
    if goal is None:
        raise InputError("no goal: pass --goal or put a 'goal:' header in the forest file")
    passes = None
    if args.passes:
        try:
            passes = [parse_pass(t) for t in _split_passes(args.passes)]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    out = normalize_forest(ff.forest, tb, goal, passes)
    text = format_forest(out, goal)
    o.set(command="normalize", forest=text, length=format_degree(verify_forest(out, tb, goal).length))
    if args.output:
        _write(args.output, text, o.out)
        o.line(f"normalized forest written to {args.output}")
    elif not o.as_json:
        o.out.write(text)
    return OK


def _split_passes(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        depth += (ch == "(") - (ch == ")")
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def cmd_validate_space(args, o: _Output) -> int:
    model = parse_space(_read(args.space))
    r = validate_space(model.space)
    o.set(command="validate-space", ok=r.ok, m1=[list(p) for p in r.m1], m2=[list(t) for t in r.m2])
    o.line("OK: quasimetric" if r.ok else "INVALID")
    for v, w in r.m1:
        o.line(f"M1: q({v},{w}) = {format_degree(model.space.q(v, w))}")
    for v, w, x in r.m2:
        s = model.space
        o.line(f"M2: q({v},{x}) = {format_degree(s.q(v, x))} > q({v},{w}) + q({w},{x}) = "
               f"{format_degree(s.q(v, w) + s.q(w, x))}")
    return OK if r.ok else NEGATIVE


def cmd_basify(args, o: _Output) -> int:
    _, tb = _theory(args.theory)
    o.set(command="basify", basic=[str(bi) for bi in tb], flat=[str(f) for f in flatten(tb)])
    for k, bi in enumerate(tb):
        o.line(f"{k}: {bi}")
        if args.flat:
            o.line(f"   {flatten([bi])[0]}")
    return OK


def cmd_taut(args, o: _Output) -> int:
    f = parse_formula(args.formula)
    t = is_tautology(f)
    o.set(command="taut", tautology=t)
    o.line("TAUTOLOGY" if t else "NOT A TAUTOLOGY")
    return OK if t else NEGATIVE


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="laeq", description="Graded implications over quasimetric spaces.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("prove", help="minimal degree and witness forest")
    s.add_argument("theory")
    s.add_argument("goal", help="e.g. 'a & b -> [?] c' or 'a -> [0.3] c'")
    s.add_argument("-o", "--output", help="write the forest file here")
    s.add_argument("--tree", action="store_true", help="also draw the forest")
    s.add_argument("--budget", type=_positive, default=3 ** 11)
    s.set_defaults(run=cmd_prove)

    s = sub.add_parser("check-forest", help="verify a forest file")
    s.add_argument("theory")
    s.add_argument("forest")
    s.add_argument("--goal", help="overrides the goal header")
    s.add_argument("--any-clause-set", action="store_true",
                   help="use b_zeta/b_eta headers instead of the standard clause sets")
    s.set_defaults(run=cmd_check_forest)

    s = sub.add_parser("check-proof", help="check a rule proof")
    s.add_argument("theory")
    s.add_argument("proof")
    s.add_argument("--r5-prime", action="store_true", help="calculus without R3 and with R5'")
    s.add_argument("--to-forest", nargs="?", const="-", metavar="PATH", help="translate to a forest")
    s.set_defaults(run=cmd_check_proof)

    s = sub.add_parser("countermodel", help="search for a small countermodel")
    s.add_argument("theory")
    s.add_argument("goal")
    s.add_argument("--max-worlds", type=_positive, default=3)
    s.add_argument("--budget", type=_positive, default=1_000_000)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_countermodel)

    s = sub.add_parser("eval", help="evaluate an implication in a space file")
    s.add_argument("space")
    s.add_argument("implication", help="degree may be '?' to only print the distance")
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("normalize", help="apply normalization passes to a forest")
    s.add_argument("theory")
    s.add_argument("forest")
    s.add_argument("--goal")
    s.add_argument("--passes", help="comma-separated, e.g. 'prune-improper,purge-polarity(x,-)'")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_normalize)

    s = sub.add_parser("validate-space", help="check the quasimetric axioms")
    s.add_argument("space")
    s.set_defaults(run=cmd_validate_space)

    s = sub.add_parser("basify", help="print the basic theory with its indices")
    s.add_argument("theory")
    s.add_argument("--flat", action="store_true", help="also print each as a graded implication")
    s.set_defaults(run=cmd_basify)

    s = sub.add_parser("taut", help="classical tautology check")
    s.add_argument("formula")
    s.set_defaults(run=cmd_taut)
    return p


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    o = _Output(args.json, out)
    try:
        code = args.run(args, o)
    except ParseError as exc:
        o.set(error=str(exc))
        o.error(f"parse error: {exc}")
        code = INPUT_ERROR
    except (InputError, ForestError, NormalizationError) as exc:
        o.set(error=str(exc))
        o.error(f"error: {exc}")
        code = INPUT_ERROR
    except SearchBudgetExceeded as exc:
        o.set(error=str(exc))
        o.error(f"budget exceeded: {exc}")
        code = BUDGET
    o.set(exit_code=code)
    o.flush()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
