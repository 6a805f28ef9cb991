"""Minimal entailment degrees over basic theories.

``entailment_degree`` runs a min/max value iteration over the consistent
clauses on the variables of the problem: ``cost(L)`` is the least length
of a forest proof tree rooted at ``L``.  ``brute_force_degree`` is an
independent exhaustive search over small forests used to cross-check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .degrees import INF, ZERO, is_inf
from .forest import STAR, CaseA, CaseB, CaseC, CaseD, ForestBuilder, ProofForest, verify_forest
from .semantics import SearchBudgetExceeded
from .syntax import (BasicImplication, Clause, Formula, GradedImplication, Literal, basic_theory_variables,
                     is_consistent, sorted_clauses, standard_clause_set, variables)

DEFAULT_STATE_BUDGET = 3 ** 11


@dataclass(frozen=True)
class DegreeResult:
    provable: bool
    degree: Optional[Fraction] = None
    forest: Optional[ProofForest] = None

    def __post_init__(self):
        if self.provable != (self.degree is not None) or self.provable != (self.forest is not None):
            raise ValueError("provable, degree and forest must be present together")


def problem_variables(tb: Sequence[BasicImplication], zeta: Formula, eta: Formula) -> list[str]:
    return sorted(basic_theory_variables(tb) | variables(zeta) | variables(eta))


# ---------------------------------------------------------------------------
# Value iteration
# ---------------------------------------------------------------------------

# A branch through ⊛ has length 0 whatever the weights above it, so a tree
# whose every branch meets ⊛ gets the value -1, below every real length.
_NONE = Fraction(-1)  # subtree whose every branch meets ⊛


def _plus(c, h):
    return h if h == _NONE or is_inf(h) else c + h


class CostTable:
    """Least forest-proof length below every consistent clause on ``names``.

    Clauses are packed as ``(P, N)`` bit masks of positive and negative
    variables.  A value of -1 marks a clause refuted outright (every branch
    below it ends in ⊛).  ``history[k]`` holds the values reachable with trees of
    height at most ``k``; it drives witness reconstruction.
    """

    def __init__(self, tb: Sequence[BasicImplication], names: Sequence[str], b_eta,
                 budget: int = DEFAULT_STATE_BUDGET):
        self.tb = list(tb)
        self.names = list(names)
        self.bit = {name: 1 << i for i, name in enumerate(self.names)}
        n = len(self.names)
        if 3 ** n > budget:
            raise SearchBudgetExceeded(f"{3 ** n} clauses over {n} variables exceed the budget of {budget}")
        self.eta = [self.pack(m) for m in b_eta]
        self.impls = [(self.pack(bi.antecedent), [self.pack(m) for m in bi.consequent_clauses], bi.degree)
                      for bi in self.tb]
        self.states = list(self._enumerate(n))
        self.options = {s: self._options(s) for s in self.states}
        self.base = {s: self._base_value(s) for s in self.states}
        self.history = self._iterate()

    def pack(self, c: Clause) -> tuple[int, int]:
        p = q = 0
        for lit in c:
            if lit.positive:
                p |= self.bit[lit.name]
            else:
                q |= self.bit[lit.name]
        return p, q

    def unpack(self, s: tuple[int, int]) -> Clause:
        p, q = s
        return frozenset(Literal(name, True) for name, b in self.bit.items() if p & b) | \
            frozenset(Literal(name, False) for name, b in self.bit.items() if q & b)

    @staticmethod
    def _enumerate(n: int):
        for digits in itertools.product(range(3), repeat=n):
            p = q = 0
            for i, d in enumerate(digits):
                if d == 1:
                    p |= 1 << i
                elif d == 2:
                    q |= 1 << i
            yield p, q

    @staticmethod
    def _sub(a, b) -> bool:
        return a[0] & ~b[0] == 0 and a[1] & ~b[1] == 0

    def _options(self, s):
        """Transitions in tie-break order: A/B by implication index, then D by variable."""
        p, q = s
        out = []
        for k, (ant, cons, d) in enumerate(self.impls):
            if not cons or not self._sub(ant, s):
                continue
            if d == 0:
                out.append(("A", k, ZERO, [(m[0] | p, m[1] | q) for m in cons]))
            else:
                out.append(("B", k, d, list(cons)))
        for i, name in enumerate(self.names):
            b = 1 << i
            if not (p | q) & b:
                out.append(("D", name, ZERO, [(p | b, q), (p, q | b)]))
        return out

    def _refuter(self, s) -> Optional[int]:
        """First implication with consequent ⊥ whose antecedent lies inside ``s``."""
        return next((k for k, (ant, cons, _) in enumerate(self.impls) if not cons and self._sub(ant, s)), None)

    def _base_value(self, s):
        if self._refuter(s) is not None:
            return _NONE
        if any(self._sub(m, s) for m in self.eta):
            return ZERO
        return INF

    @staticmethod
    def _value(table, child):
        p, q = child
        return _NONE if p & q else table[child]

    def _iterate(self):
        current = dict(self.base)
        history = [current]
        while True:
            nxt = {}
            for s in self.states:
                best = current[s]
                for opt in self.options[s]:
                    v = _plus(opt[2], max(self._value(current, c) for c in opt[3]))
                    if v < best:
                        best = v
                nxt[s] = best
            if nxt == current:
                return history
            history.append(nxt)
            current = nxt

    @property
    def final(self) -> dict:
        return self.history[-1]

    def cost(self, c: Clause):
        """Least length of a tree at ``c``; -1 when every branch can end in ⊛, INF when unprovable."""
        s = self.pack(c)
        return _NONE if s[0] & s[1] else self.final[s]

    def build(self, b: ForestBuilder, s, parent: Optional[int], weight, level: Optional[int] = None) -> int:
        """Add a tree for clause ``s`` below ``parent`` realising ``history[level][s]``.

        Children are built one level lower, so reconstruction always ends.
        """
        label = self.unpack(s)
        if s[0] & s[1]:
            node = b.add(label, parent, weight, CaseC())
            b.add(STAR, node, 0)
            return node
        if level is None:
            level = len(self.history) - 1
        target = self.history[level][s]
        if self.base[s] == target:
            k_bot = self._refuter(s)
            if k_bot is None:
                return b.add(label, parent, weight)
            bi = self.tb[k_bot]
            node = b.add(label, parent, weight, CaseA(k_bot) if bi.degree == 0 else CaseB(k_bot))
            b.add(STAR, node, bi.degree)
            return node
        k = next(k for k in range(level + 1) if self.history[k][s] == target)
        prev = self.history[k - 1]
        for opt in self.options[s]:
            if _plus(opt[2], max(self._value(prev, c) for c in opt[3])) == target:
                kind, arg, w, kids = opt
                just = {"A": CaseA, "B": CaseB, "D": CaseD}[kind](arg)
                node = b.add(label, parent, weight, just)
                for c in dict.fromkeys(kids):
                    self.build(b, c, node, w, k - 1)
                return node
        raise AssertionError("no transition reproduces the stored value")  # pragma: no cover


def cost_table(tb: Sequence[BasicImplication], zeta: Formula, eta: Formula,
               budget: int = DEFAULT_STATE_BUDGET) -> CostTable:
    return CostTable(tb, problem_variables(tb, zeta, eta), standard_clause_set(eta), budget)


def entailment_degree(tb: Sequence[BasicImplication], zeta: Formula, eta: Formula,
                      budget: int = DEFAULT_STATE_BUDGET) -> DegreeResult:
    """Least ``r`` with ``zeta →[r] eta`` provable from ``tb``, with a witnessing forest."""
    b_zeta = sorted_clauses(standard_clause_set(zeta))
    if not b_zeta:
        return DegreeResult(True, ZERO, ProofForest(()))
    table = cost_table(tb, zeta, eta, budget)
    costs = [table.cost(k) for k in b_zeta]
    if any(is_inf(c) for c in costs):
        return DegreeResult(False)
    b = ForestBuilder()
    for k in b_zeta:
        table.build(b, table.pack(k), None, ZERO)
    return DegreeResult(True, max(max(costs), ZERO), b.freeze())


def prove(tb: Sequence[BasicImplication], goal: GradedImplication,
          budget: int = DEFAULT_STATE_BUDGET) -> DegreeResult:
    return entailment_degree(tb, goal.antecedent, goal.consequent, budget)


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def _partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _compositions(total: int, parts: int):
    """Ways to give each of ``parts`` children at least one node, using at most ``total``."""
    if parts == 0:
        yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Oracle:
    def __init__(self, tb, names, b_eta, budget):
        self.tb = list(tb)
        self.names = list(names)
        self.b_eta = list(b_eta)
        self.budget = budget
        self.steps = 0
        self.best = lru_cache(maxsize=None)(self._best)
        self.sub_best = lru_cache(maxsize=None)(self._sub_best)
        self.sub_with = lru_cache(maxsize=None)(self._sub_with)

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise SearchBudgetExceeded(f"oracle search exceeded {self.budget} steps")

    def _sub_best(self, allowed: frozenset, n: int):
        """Best tree whose root is any subset of ``allowed``: (value, label)."""
        self.tick()
        best = (self.best(allowed, n)[0], allowed)
        for lit in sorted(allowed, key=lambda x: x.key):
            cand = self.sub_best(allowed - {lit}, n)
            if cand[0] < best[0]:
                best = cand
        return best

    def _sub_with(self, lit: Literal, base: frozenset, n: int):
        """Best tree whose root is ``{lit}`` plus any subset of ``base``."""
        self.tick()
        label = base | {lit}
        best = (self.best(label, n)[0], label)
        for x in sorted(base, key=lambda y: y.key):
            cand = self.sub_with(lit, base - {x}, n)
            if cand[0] < best[0]:
                best = cand
        return best

    def _cover(self, allowed_sets, n, weight):
        """Children covering the given allowed sets, a child possibly serving several."""
        best = (INF, None)
        for part in _partitions(range(len(allowed_sets))):
            blocks = [frozenset.intersection(*[allowed_sets[i] for i in blk]) for blk in part]
            for budget in _compositions(n - 1, len(blocks)):
                self.tick()
                picks = [self.sub_best(u, m) for u, m in zip(blocks, budget)]
                value = max(_plus(weight, v) for v, _ in picks)
                if value < best[0]:
                    best = (value, [(lab, m) for (_, lab), m in zip(picks, budget)])
        return best

    def _best(self, label: frozenset, n: int):
        """(value, choice) of the best proof tree at ``label`` with at most ``n`` nodes."""
        self.tick()
        best = (INF, None)
        if any(m <= label for m in self.b_eta):
            best = (ZERO, ("leaf",))
        if n < 2:
            return best
        if not is_consistent(label):
            best = (_NONE, ("C",))
        for k, bi in enumerate(self.tb):
            if not bi.antecedent <= label:
                continue
            if not bi.consequent:
                if _NONE < best[0]:
                    best = (_NONE, ("bot", k))
                continue
            if bi.degree == 0:
                allowed = [m | label for m in bi.consequent_clauses]
            else:
                allowed = list(bi.consequent_clauses)
            value, kids = self._cover(allowed, n, bi.degree)
            if value < best[0]:
                best = (value, ("A" if bi.degree == 0 else "B", k, kids))
        if n >= 3:
            for name in self.names:
                p, q = Literal(name, True), Literal(name, False)
                for m1 in range(1, n - 1):
                    m2 = n - 1 - m1
                    v1, l1 = self.sub_with(p, label, m1)
                    v2, l2 = self.sub_with(q, label, m2)
                    value = max(v1, v2)
                    if value < best[0]:
                        best = (value, ("D", name, [(l1, m1), (l2, m2)]))
        return best

    def build(self, b: ForestBuilder, label, n, parent, weight):
        value, choice = self.best(label, n)
        kind = choice[0]
        if kind == "leaf":
            return b.add(label, parent, weight)
        if kind == "C":
            node = b.add(label, parent, weight, CaseC())
            b.add(STAR, node, 0)
            return node
        if kind == "bot":
            bi = self.tb[choice[1]]
            node = b.add(label, parent, weight, CaseA(choice[1]) if bi.degree == 0 else CaseB(choice[1]))
            b.add(STAR, node, bi.degree)
            return node
        if kind in ("A", "B"):
            k, kids = choice[1], choice[2]
            node = b.add(label, parent, weight, CaseA(k) if kind == "A" else CaseB(k))
            for lab, m in kids:
                self.build(b, lab, m, node, self.tb[k].degree)
            return node
        name, kids = choice[1], choice[2]
        node = b.add(label, parent, weight, CaseD(name))
        for lab, m in kids:
            self.build(b, lab, m, node, ZERO)
        return node


def brute_force_degree(tb: Sequence[BasicImplication], zeta: Formula, eta: Formula, max_nodes: int = 10,
                       budget: int = 5_000_000) -> DegreeResult:
    """Least length over all forest proofs with at most ``max_nodes`` nodes.

    Every label over the problem's variables is considered, consistent or
    not, with every admissible child label (any subset of the allowed
    clause) and every way of sharing one child between several consequent
    clauses.  Extra children and subtrees below ⊛ are never needed for a
    shorter proof and are not generated.  The witness is re-verified.
    """
    b_zeta = sorted_clauses(standard_clause_set(zeta))
    if not b_zeta:
        return DegreeResult(True, ZERO, ProofForest(()))
    oracle = _Oracle(tb, problem_variables(tb, zeta, eta), sorted_clauses(standard_clause_set(eta)), budget)
    roots_best = oracle._cover(list(b_zeta), max_nodes + 1, ZERO)
    value, roots = roots_best
    if is_inf(value):
        return DegreeResult(False)
    b = ForestBuilder()
    for lab, m in roots:
        oracle.build(b, lab, m, None, ZERO)
    forest = b.freeze()
    degree = max(value, ZERO)
    report = verify_forest(forest, tb, GradedImplication(zeta, eta, degree))
    if not report.ok or len(forest) > max_nodes:
        raise AssertionError(f"oracle witness fails verification: {report.violations}")  # pragma: no cover
    return DegreeResult(True, degree, forest)
