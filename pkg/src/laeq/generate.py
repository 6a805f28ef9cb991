"""Seeded random instances for property tests, the acceptance suite and the demos."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .degrees import INF
from .semantics import FiniteQuasimetricSpace, Model
from .syntax import BOTTOM, And, BasicImplication, Formula, Literal, Not, Or, Var, clause_set_formula, flatten

SMALL_DEGREES = (Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(3, 10))


def random_clause(rng: random.Random, names: Sequence[str], size: int) -> frozenset:
    return frozenset(Literal(n, rng.random() < 0.5) for n in rng.sample(list(names), size))


def random_basic_theory(rng: random.Random, names: Sequence[str], max_impls: int = 3,
                        degrees: Sequence[Fraction] = SMALL_DEGREES, max_cons: int = 2) -> list[BasicImplication]:
    tb = []
    n = len(names)
    for _ in range(rng.randint(0, max_impls)):
        ant = random_clause(rng, names, rng.randint(1, n))
        cons = frozenset(random_clause(rng, names, rng.randint(1, n)) for _ in range(rng.randint(0, max_cons)))
        tb.append(BasicImplication(ant, cons, rng.choice(degrees)))
    return tb


def random_dnf(rng: random.Random, names: Sequence[str], min_size: int = 1, max_clauses: int = 2) -> Formula:
    n = len(names)
    return clause_set_formula({random_clause(rng, names, rng.randint(min_size, n))
                               for _ in range(rng.randint(1, max_clauses))})


def random_instance(rng: random.Random, names: Sequence[str] = ("a", "b", "c"), max_impls: int = 3,
                    degrees: Sequence[Fraction] = SMALL_DEGREES):
    """A basic theory over a random prefix of ``names`` with DNF antecedent and consequent."""
    vs = list(names[:rng.randint(1, len(names))])
    tb = random_basic_theory(rng, vs, max_impls, degrees)
    return tb, random_dnf(rng, vs, 0), random_dnf(rng, vs, 1)


def random_formula(rng: random.Random, names: Sequence[str], depth: int = 2) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        v = Var(rng.choice(list(names)))
        return Not(v) if rng.random() < 0.3 else v
    kind = rng.random()
    if kind < 0.15:
        return Not(random_formula(rng, names, depth - 1))
    ctor = And if kind < 0.6 else Or
    return ctor(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))


def random_space(rng: random.Random, n: int, degrees: Sequence = SMALL_DEGREES[1:] + (Fraction(1, 2), INF),
                 metric: bool = True) -> FiniteQuasimetricSpace:
    """A space on ``n`` worlds with off-diagonal distances from ``degrees``.

    With ``metric`` the triangle inequality is restored by shortest paths.
    """
    worlds = [f"w{i + 1}" for i in range(n)]
    d = [[Fraction(0) if i == j else rng.choice(degrees) for j in range(n)] for i in range(n)]
    if metric:
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if d[i][k] + d[k][j] < d[i][j]:
                        d[i][j] = d[i][k] + d[k][j]
    return FiniteQuasimetricSpace(tuple(worlds), tuple(tuple(r) for r in d))


def random_model(rng: random.Random, names: Sequence[str], n: int, **kw) -> Model:
    space = random_space(rng, n, **kw)
    valuation = {v: frozenset(w for w in space.worlds if rng.random() < 0.5) for v in names}
    return Model(space, valuation)


def random_rule_proof(rng: random.Random, tb: Sequence[BasicImplication], names: Sequence[str],
                      moves: int = 12):
    """A checker-clean rule proof from ``flatten(tb)`` built from random rule applications."""
    from .rules import ProofBuilder

    pb = ProofBuilder(flatten(tb))

    def some_formula() -> Formula:
        return random_formula(rng, names, rng.randint(0, 2))

    def start() -> int:
        if tb and rng.random() < 0.7:
            return pb.axiom(rng.randrange(len(tb)))
        a = some_formula()
        b = rng.choice([a, Or(a, some_formula()), Or(some_formula(), a)])
        if rng.random() < 0.3:
            a = And(a, some_formula())
        return pb.r1(a, b)

    live = [start()]
    for _ in range(moves):
        i = rng.choice(live)
        c = pb.concl(i)
        move = rng.random()
        if move < 0.15:
            j = start()
        elif move < 0.3 and c.degree == 0:
            j = pb.r2(i, some_formula())
        elif move < 0.4:
            j = pb.r3(i, c.degree + rng.choice(SMALL_DEGREES[1:]))
        elif move < 0.45 and c.consequent == BOTTOM:
            j = pb.r4(i)
        elif move < 0.65:
            # weaken the consequent, then chain
            target = rng.choice([Or(c.consequent, some_formula()), Or(some_formula(), c.consequent)])
            j = pb.r6(i, pb.r1(c.consequent, target))
        elif move < 0.8:
            k = rng.choice(live)
            d = pb.concl(k)
            joint = Or(c.consequent, d.consequent)
            a = pb.r6(i, pb.r1(c.consequent, joint))
            b = pb.r6(k, pb.r1(d.consequent, joint))
            j = pb.disjunction([a, b])
        else:
            nxt = [k for k in live if pb.concl(k).antecedent == c.consequent]
            if nxt:
                j = pb.r6(i, rng.choice(nxt))
            else:
                # strengthen the antecedent by R1 and chain
                ant = And(c.antecedent, some_formula())
                j = pb.r6(pb.r1(ant, c.antecedent), i)
        live.append(j)
    return pb.finish(live[-1])


__all__ = ["SMALL_DEGREES", "random_clause", "random_basic_theory", "random_dnf", "random_instance",
           "random_formula", "random_space", "random_model", "random_rule_proof"]


def with_fresh_split(forest, var: str):
    """Put a case D split on ``var`` above every root of ``forest``.

    Both copies of a tree get ``var`` (resp. its negation) added along the
    case A and D nodes, so the result verifies whenever ``forest`` does and
    ``var`` is fresh.  Used to give the purge pass something to remove.
    """
    from .forest import CaseA, CaseD, ForestBuilder, is_star

    b = ForestBuilder()

    def copy(i, parent, lit, grow):
        n = forest[i]
        label = n.label | {lit} if grow and not is_star(n.label) else n.label
        new = b.add(label, parent, n.weight, n.just)
        for k in forest.children[i]:
            copy(k, new, lit, grow and isinstance(n.just, (CaseA, CaseD)))

    for r in forest.roots:
        if is_star(forest[r].label):
            copy(r, None, None, False)
            continue
        top = b.add(forest[r].label, None, 0, CaseD(var))
        for lit in (Literal(var, True), Literal(var, False)):
            copy(r, top, lit, True)
    return b.freeze()
