"""Rule-level proofs (rules R1 to R6), their checker, and translations to and from forests.

A proof is a sequence of steps; each step states its conclusion and the
rule that produced it from earlier steps.  Formulas are compared
syntactically, so Boolean rewriting has to go through explicit R1 steps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .degrees import ZERO, format_degree
from .forest import (STAR, CaseA, CaseB, CaseC, CaseD, ForestBuilder, ProofForest, _star_free_height,
                     is_star, verify_forest)
from .normalize import cap_inconsistent, prune_improper
from .parser import ParseError, _parse_implication, parse_formula, strip_comment
from .syntax import (BOTTOM, And, BasicImplication, Bottom, Clause, Formula, GradedImplication, Literal, Or,
                     clause_formula, clause_set_formula, disjoin, flatten, format_formula, implies,
                     is_tautology, pos, neg, sorted_clauses, sorted_literals, standard_clause_set, variables)


@dataclass(frozen=True)
class Axiom:
    index: int


@dataclass(frozen=True)
class R1:
    pass


@dataclass(frozen=True)
class R2:
    premise: int
    gamma: Formula


@dataclass(frozen=True)
class R3:
    premise: int


@dataclass(frozen=True)
class R4:
    premise: int


@dataclass(frozen=True)
class R5:
    premise1: int
    premise2: int


@dataclass(frozen=True)
class R5Prime:
    """Disjunction of antecedents at the larger of the two degrees."""

    premise1: int
    premise2: int


@dataclass(frozen=True)
class R6:
    premise1: int
    premise2: int


Rule = Union[Axiom, R1, R2, R3, R4, R5, R5Prime, R6]


@dataclass(frozen=True)
class RuleStep:
    index: int
    conclusion: GradedImplication
    rule: Rule


def premises(rule: Rule) -> tuple[int, ...]:
    if isinstance(rule, (R2, R3, R4)):
        return (rule.premise,)
    if isinstance(rule, (R5, R5Prime, R6)):
        return (rule.premise1, rule.premise2)
    return ()


@dataclass(frozen=True)
class StepViolation:
    index: int
    message: str

    def __str__(self):
        return f"step {self.index}: {self.message}"


@dataclass(frozen=True)
class ProofReport:
    ok: bool
    violations: list = field(default_factory=list)
    conclusion: Optional[GradedImplication] = None

    def __bool__(self):
        return self.ok


def _check_step(step: RuleStep, steps: Sequence[RuleStep], theory, r5_prime: bool) -> Optional[str]:
    c = step.conclusion
    rule = step.rule
    for p in premises(rule):
        if not 0 <= p < step.index:
            return f"premise {p} does not precede the step"
    prem = [steps[p].conclusion for p in premises(rule)]
    if isinstance(rule, Axiom):
        if not 0 <= rule.index < len(theory):
            return f"axiom index {rule.index} is out of range"
        if c != theory[rule.index]:
            return f"conclusion differs from theory element {rule.index}"
    elif isinstance(rule, R1):
        if c.degree != 0:
            return "R1 concludes degree 0 only"
        if not is_tautology(implies(c.antecedent, c.consequent)):
            return "R1 needs a classical tautology"
    elif isinstance(rule, R2):
        (p,) = prem
        if p.degree != 0:
            return "R2 needs a premise of degree 0"
        if c != GradedImplication(And(p.antecedent, rule.gamma), And(p.consequent, rule.gamma), 0):
            return "R2 conclusion must conjoin gamma to both sides at degree 0"
    elif isinstance(rule, R3):
        if r5_prime:
            return "R3 is not a rule of the R5' calculus"
        (p,) = prem
        if (c.antecedent, c.consequent) != (p.antecedent, p.consequent) or c.degree < p.degree:
            return "R3 keeps both sides and may only raise the degree"
    elif isinstance(rule, R4):
        (p,) = prem
        if not isinstance(p.consequent, Bottom):
            return "R4 needs a premise with consequent 0"
        if c != GradedImplication(p.antecedent, BOTTOM, 0):
            return "R4 concludes the same antecedent -> [0] 0"
    elif isinstance(rule, (R5, R5Prime)):
        if isinstance(rule, R5) and r5_prime:
            return "R5 is replaced by R5' in this calculus"
        if isinstance(rule, R5Prime) and not r5_prime:
            return "R5' is only available in the R5' calculus"
        p1, p2 = prem
        if p1.consequent != p2.consequent:
            return "disjunction rule needs premises with the same consequent"
        if isinstance(rule, R5):
            if p1.degree != p2.degree:
                return "R5 needs premises of equal degree"
            degree = p1.degree
        else:
            degree = max(p1.degree, p2.degree)
        if c != GradedImplication(Or(p1.antecedent, p2.antecedent), p1.consequent, degree):
            return "conclusion must be the disjunction of the antecedents"
    elif isinstance(rule, R6):
        p1, p2 = prem
        if p1.consequent != p2.antecedent:
            return "R6 needs the first consequent to be the second antecedent"
        if c != GradedImplication(p1.antecedent, p2.consequent, p1.degree + p2.degree):
            return "R6 concludes the outer formulas at the summed degree"
    else:
        return f"unknown rule {rule!r}"
    return None


def check_rule_proof(proof: Sequence[RuleStep], theory: Sequence[GradedImplication],
                     r5_prime: bool = False) -> ProofReport:
    """Check every step; ``r5_prime`` switches to the calculus without R3 and with R5'."""
    violations = []
    for pos_, step in enumerate(proof):
        if step.index != pos_:
            violations.append(StepViolation(step.index, f"expected step number {pos_}"))
            continue
        msg = _check_step(step, proof, theory, r5_prime)
        if msg:
            violations.append(StepViolation(step.index, msg))
    conclusion = proof[-1].conclusion if proof else None
    return ProofReport(not violations, violations, conclusion)


# ---------------------------------------------------------------------------
# Building proofs
# ---------------------------------------------------------------------------


class ProofBuilder:
    """Appends steps, reusing any earlier step with the same conclusion."""

    def __init__(self, theory: Sequence[GradedImplication]):
        self.theory = list(theory)
        self.steps: list[RuleStep] = []
        self._seen: dict[GradedImplication, int] = {}

    def _emit(self, conclusion: GradedImplication, rule: Rule) -> int:
        if conclusion in self._seen:
            return self._seen[conclusion]
        i = len(self.steps)
        self.steps.append(RuleStep(i, conclusion, rule))
        self._seen[conclusion] = i
        return i

    def concl(self, i: int) -> GradedImplication:
        return self.steps[i].conclusion

    def axiom(self, k: int) -> int:
        return self._emit(self.theory[k], Axiom(k))

    def r1(self, a: Formula, b: Formula) -> int:
        return self._emit(GradedImplication(a, b, 0), R1())

    def r2(self, p: int, gamma: Formula) -> int:
        c = self.concl(p)
        return self._emit(GradedImplication(And(c.antecedent, gamma), And(c.consequent, gamma), 0), R2(p, gamma))

    def r3(self, p: int, degree) -> int:
        c = self.concl(p)
        if degree == c.degree:
            return p
        return self._emit(c.with_degree(degree), R3(p))

    def r4(self, p: int) -> int:
        c = self.concl(p)
        return self._emit(GradedImplication(c.antecedent, BOTTOM, 0), R4(p))

    def r5(self, p1: int, p2: int) -> int:
        a, b = self.concl(p1), self.concl(p2)
        return self._emit(GradedImplication(Or(a.antecedent, b.antecedent), a.consequent, a.degree), R5(p1, p2))

    def r6(self, p1: int, p2: int) -> int:
        a, b = self.concl(p1), self.concl(p2)
        return self._emit(GradedImplication(a.antecedent, b.consequent, a.degree + b.degree), R6(p1, p2))

    def finish(self, i: int) -> list[RuleStep]:
        """The steps, ending with the conclusion of step ``i`` (repeated by R3 if reused earlier)."""
        if i != len(self.steps) - 1:
            c = self.concl(i)
            self.steps.append(RuleStep(len(self.steps), c, R3(i)))
        return self.steps

    def chain(self, *ps: int) -> int:
        out = ps[0]
        for p in ps[1:]:
            out = self.r6(out, p)
        return out

    def disjunction(self, ps: Sequence[int]) -> int:
        """Left-nested R5 over steps sharing a consequent, after raising them to a common degree."""
        top = max(self.concl(p).degree for p in ps)
        ps = [self.r3(p, top) for p in ps]
        out = ps[0]
        for p in ps[1:]:
            out = self.r5(out, p)
        return out


def forest_to_rule_proof(forest: ProofForest, tb: Sequence[BasicImplication],
                         goal: GradedImplication) -> list[RuleStep]:
    """Turn a forest proof of ``goal`` into a rule proof from ``flatten(tb)``."""
    report = verify_forest(forest, tb, goal)
    if not report.ok:
        raise ValueError("not a forest proof of the goal: " + "; ".join(str(v) for v in report.violations))
    forest = prune_improper(forest)
    pb = ProofBuilder(flatten(tb))
    eta = goal.consequent
    zeta = goal.antecedent
    b_zeta = sorted_clauses(standard_clause_set(zeta))
    if not b_zeta:
        return pb.finish(pb.r3(pb.r1(zeta, eta), goal.degree))

    memo: dict[int, tuple] = {}

    def to_eta(res) -> tuple[int, Fraction]:
        if res[0] == "bot":
            return pb.r6(res[1], pb.r1(BOTTOM, eta)), ZERO
        return res[1], res[2]

    def claim(i: int) -> tuple:
        """("bot", step) for ⋀L -> [0] 0, or ("eta", step, e) for ⋀L -> [e] eta."""
        if i in memo:
            return memo[i]
        node = forest[i]
        cl = clause_formula(node.label)
        kids = forest.children[i]
        just = node.just
        if not kids:
            res = ("eta", pb.r1(cl, eta), ZERO)
        elif len(kids) == 1 and is_star(forest[kids[0]].label):
            if isinstance(just, CaseC):
                res = ("bot", pb.r1(cl, BOTTOM))
            else:
                k = just.impl
                ant = pb.concl(pb.axiom(k)).antecedent
                res = ("bot", pb.chain(pb.r1(cl, ant), pb.r4(pb.axiom(k))))
        else:
            labels = [forest[k].label for k in kids]
            phi = disjoin(clause_formula(lab) for lab in labels)
            if isinstance(just, CaseA):
                ax = pb.axiom(just.impl)
                a = pb.concl(ax)
                step = pb.chain(pb.r1(cl, And(a.antecedent, cl)), pb.r2(ax, cl), pb.r1(And(a.consequent, cl), phi))
            elif isinstance(just, CaseB):
                ax = pb.axiom(just.impl)
                a = pb.concl(ax)
                step = pb.chain(pb.r1(cl, a.antecedent), ax, pb.r1(a.consequent, phi))
            else:
                step = pb.r1(cl, phi)
            results = [claim(k) for k in kids]
            if all(r[0] == "bot" for r in results):
                res = ("bot", pb.r4(pb.r6(step, pb.disjunction([r[1] for r in results]))))
            else:
                parts = [to_eta(r) for r in results]
                joined = pb.disjunction([p for p, _ in parts])
                res = ("eta", pb.r6(step, joined), pb.concl(step).degree + pb.concl(joined).degree)
        memo[i] = res
        return res

    per_clause = []
    for k in b_zeta:
        root = next(r for r in forest.roots if forest[r].proper and forest[r].label <= k)
        step, _ = to_eta(claim(root))
        step = pb.r6(pb.r1(clause_formula(k), clause_formula(forest[root].label)), step)
        per_clause.append(pb.r3(step, goal.degree))
    joined = pb.disjunction(per_clause)
    return pb.finish(pb.r6(pb.r1(zeta, clause_set_formula(b_zeta)), joined))


# ---------------------------------------------------------------------------
# From rule proofs to forests
# ---------------------------------------------------------------------------


def _star_forest() -> ProofForest:
    b = ForestBuilder()
    b.add(STAR)
    return b.freeze()


def expand_to_cover(b: ForestBuilder, node: int, targets: Sequence[Clause], names: Sequence[str]) -> list:
    """Split ``node`` by case D until every leaf includes a target; returns (leaf, target) pairs."""
    label = b.label(node)
    hit = next((t for t in targets if t <= label), None)
    if hit is not None:
        return [(node, hit)]
    free = [v for v in names if pos(v) not in label and neg(v) not in label]
    if not free:
        raise ValueError("case splits cannot reach a target clause")
    v = free[0]
    b.set_just(node, CaseD(v))
    out = []
    for lit in (pos(v), neg(v)):
        kid = b.add(label | {lit}, node, 0)
        out.extend(expand_to_cover(b, kid, targets, names))
    return out


def _axiom_forest(bi: BasicImplication, k: int) -> ProofForest:
    b = ForestBuilder()
    just = CaseA(k) if bi.degree == 0 else CaseB(k)
    root = b.add(bi.antecedent, None, 0, just)
    if not bi.consequent:
        b.add(STAR, root, bi.degree)
    else:
        kids = [m | bi.antecedent if bi.degree == 0 else m for m in bi.consequent_clauses]
        for m in dict.fromkeys(kids):
            b.add(m, root, bi.degree)
    return b.freeze()


def _r1_forest(a: Formula, c: Formula) -> ProofForest:
    b_a = sorted_clauses(standard_clause_set(a))
    if not b_a:
        return _star_forest()
    b_c = sorted_clauses(standard_clause_set(c))
    names = sorted(variables(c))
    b = ForestBuilder()
    for k in b_a:
        expand_to_cover(b, b.add(k), b_c, names)
    return b.freeze()


def _add_literals(forest: ProofForest, extra: Clause, b: ForestBuilder):
    """Copy ``forest`` into ``b`` with ``extra`` added to roots and pushed through case A and D nodes."""

    def copy(i, parent, grow):
        n = forest[i]
        label = n.label if is_star(n.label) or not grow else n.label | extra
        new = b.add(label, parent, n.weight, n.just)
        pass_on = grow and isinstance(n.just, (CaseA, CaseD))
        for k in forest.children[i]:
            copy(k, new, pass_on)

    for r in forest.roots:
        copy(r, None, True)


def _r2_forest(premise: ProofForest, a: Formula, gamma: Formula) -> ProofForest:
    b_a = standard_clause_set(a)
    b_g = sorted_clauses(standard_clause_set(gamma))
    if not b_a or not b_g:
        return _star_forest()
    base = cap_inconsistent(prune_improper(premise))
    b = ForestBuilder()
    for g in b_g:
        _add_literals(base, g, b)
    return prune_improper(cap_inconsistent(b.freeze()))


def _r6_forest(first: ProofForest, second: ProofForest, middle: Formula) -> ProofForest:
    first = cap_inconsistent(prune_improper(first))
    if not standard_clause_set(middle):
        return first
    b_mid = sorted_clauses(standard_clause_set(middle))
    roots = [r for r in second.roots if second[r].proper]
    b = ForestBuilder.from_forest(first)
    names = sorted(variables(middle))
    for leaf in b.preorder():
        if b.children(leaf) or is_star(b.label(leaf)):
            continue
        root_labels = [second[r].label for r in roots]
        for node, target in expand_to_cover(b, leaf, root_labels, names):
            src = next(r for r in roots if second[r].label == target)
            b.graft_children(second, src, node, second[src].just)
    return b.freeze()


def rule_proof_to_forest(proof: Sequence[RuleStep], tb: Sequence[BasicImplication]) -> ProofForest:
    """Forest proof of the last conclusion, built step by step."""
    theory = flatten(tb)
    report = check_rule_proof(proof, theory)
    if not report.ok:
        raise ValueError("rule proof does not check: " + "; ".join(str(v) for v in report.violations))
    if not proof:
        raise ValueError("empty proof")
    forests: list[ProofForest] = []
    for step in proof:
        rule, c = step.rule, step.conclusion
        if isinstance(rule, Axiom):
            f = _axiom_forest(tb[rule.index], rule.index)
        elif isinstance(rule, R1):
            f = _r1_forest(c.antecedent, c.consequent)
        elif isinstance(rule, R2):
            f = _r2_forest(forests[rule.premise], proof[rule.premise].conclusion.antecedent, rule.gamma)
        elif isinstance(rule, R3):
            f = forests[rule.premise]
        elif isinstance(rule, R4):
            f = prune_improper(cap_inconsistent(forests[rule.premise]))
        elif isinstance(rule, R5):
            b = ForestBuilder.from_forest(forests[rule.premise1])
            for r in forests[rule.premise2].roots:
                b.graft(forests[rule.premise2], r, None)
            f = b.freeze()
        elif isinstance(rule, R6):
            f = _r6_forest(forests[rule.premise1], forests[rule.premise2],
                           proof[rule.premise1].conclusion.consequent)
        else:
            raise ValueError(f"cannot translate {rule!r}")
        forests.append(f)
    return forests[-1]


# ---------------------------------------------------------------------------
# The R5' calculus
# ---------------------------------------------------------------------------


def to_lae_prime(proof: Sequence[RuleStep]) -> list[RuleStep]:
    """Drop R3 and use R5' instead of R5; degrees only go down."""
    out: list[RuleStep] = []
    where: dict[int, int] = {}
    for step in proof:
        rule, c = step.rule, step.conclusion
        if isinstance(rule, R3):
            where[step.index] = where[rule.premise]
            continue
        if isinstance(rule, (Axiom, R1)):
            new = RuleStep(len(out), c, rule)
        elif isinstance(rule, R2):
            p = where[rule.premise]
            pc = out[p].conclusion
            new = RuleStep(len(out), GradedImplication(And(pc.antecedent, rule.gamma),
                                                       And(pc.consequent, rule.gamma), 0), R2(p, rule.gamma))
        elif isinstance(rule, R4):
            p = where[rule.premise]
            new = RuleStep(len(out), GradedImplication(out[p].conclusion.antecedent, BOTTOM, 0), R4(p))
        elif isinstance(rule, (R5, R5Prime)):
            p1, p2 = where[rule.premise1], where[rule.premise2]
            a, b = out[p1].conclusion, out[p2].conclusion
            new = RuleStep(len(out), GradedImplication(Or(a.antecedent, b.antecedent), a.consequent,
                                                       max(a.degree, b.degree)), R5Prime(p1, p2))
        elif isinstance(rule, R6):
            p1, p2 = where[rule.premise1], where[rule.premise2]
            a, b = out[p1].conclusion, out[p2].conclusion
            new = RuleStep(len(out), GradedImplication(a.antecedent, b.consequent, a.degree + b.degree),
                           R6(p1, p2))
        else:
            raise ValueError(f"unknown rule {rule!r}")
        where[step.index] = len(out)
        out.append(new)
    if proof:
        # a trailing R3 maps back to an earlier step; end the proof there
        out = out[:where[proof[-1].index] + 1]
    return out


def from_lae_prime(proof: Sequence[RuleStep]) -> list[RuleStep]:
    """Replace every R5' by R3 steps to the larger degree followed by R5."""
    out: list[RuleStep] = []
    where: dict[int, int] = {}

    def emit(c, rule) -> int:
        out.append(RuleStep(len(out), c, rule))
        return len(out) - 1

    for step in proof:
        rule = step.rule
        if isinstance(rule, R5Prime):
            p1, p2 = where[rule.premise1], where[rule.premise2]
            a, b = out[p1].conclusion, out[p2].conclusion
            top = max(a.degree, b.degree)
            if a.degree < top:
                p1 = emit(a.with_degree(top), R3(p1))
            if b.degree < top:
                p2 = emit(b.with_degree(top), R3(p2))
            where[step.index] = emit(step.conclusion, R5(p1, p2))
            continue
        renum = {R2: lambda r: R2(where[r.premise], r.gamma), R3: lambda r: R3(where[r.premise]),
                 R4: lambda r: R4(where[r.premise]), R5: lambda r: R5(where[r.premise1], where[r.premise2]),
                 R6: lambda r: R6(where[r.premise1], where[r.premise2])}
        new_rule = renum[type(rule)](rule) if type(rule) in renum else rule
        where[step.index] = emit(step.conclusion, new_rule)
    return out


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_RULE_WORDS = {"axiom": 1, "r1": 0, "r2": 1, "r3": 1, "r4": 1, "r5": 2, "r5p": 2, "r6": 2}


def format_rule(rule: Rule) -> str:
    if isinstance(rule, Axiom):
        return f"axiom {rule.index}"
    if isinstance(rule, R1):
        return "r1"
    if isinstance(rule, R2):
        return f"r2 {rule.premise} gamma={format_formula(rule.gamma)}"
    if isinstance(rule, R3):
        return f"r3 {rule.premise}"
    if isinstance(rule, R4):
        return f"r4 {rule.premise}"
    if isinstance(rule, R5):
        return f"r5 {rule.premise1} {rule.premise2}"
    if isinstance(rule, R5Prime):
        return f"r5p {rule.premise1} {rule.premise2}"
    if isinstance(rule, R6):
        return f"r6 {rule.premise1} {rule.premise2}"
    raise ValueError(f"unknown rule {rule!r}")


def format_rule_proof(proof: Sequence[RuleStep]) -> str:
    return "".join(f"{s.index}: {s.conclusion} ; {format_rule(s.rule)}\n" for s in proof)


def _parse_rule(text: str) -> Rule:
    text = text.strip()
    word, _, rest = text.partition(" ")
    if word not in _RULE_WORDS:
        raise ValueError(f"unknown rule {word!r}")
    if word == "r2":
        m = re.fullmatch(r"(\d+)\s+gamma\s*=\s*(.+)", rest.strip())
        if not m:
            raise ValueError("expected 'r2 <premise> gamma=<formula>'")
        return R2(int(m.group(1)), parse_formula(m.group(2)))
    args = rest.split()
    if len(args) != _RULE_WORDS[word] or not all(a.isdigit() for a in args):
        raise ValueError(f"rule {word} takes {_RULE_WORDS[word]} step number(s)")
    nums = [int(a) for a in args]
    return {"axiom": lambda: Axiom(*nums), "r1": R1, "r3": lambda: R3(*nums), "r4": lambda: R4(*nums),
            "r5": lambda: R5(*nums), "r5p": lambda: R5Prime(*nums), "r6": lambda: R6(*nums)}[word]()


def parse_rule_proof(text: str) -> list[RuleStep]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = strip_comment(raw).strip()
        if not body:
            continue
        m = re.match(r"(\d+)\s*:(.*);([^;]*)$", body)
        if not m:
            raise ParseError("expected '<idx>: <implication> ; <rule>'", lineno)
        ant, cons, degree = _parse_implication(m.group(2), lineno, False)
        try:
            rule = _parse_rule(m.group(3))
        except ParseError as exc:
            raise ParseError(exc.message, lineno, exc.column) from None
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        steps.append(RuleStep(int(m.group(1)), GradedImplication(ant, cons, degree), rule))
    return steps
