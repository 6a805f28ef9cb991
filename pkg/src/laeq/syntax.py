"""Boolean formulas, clauses and graded implications.

Formulas are immutable trees built from :class:`Var`, :class:`Bottom`,
:class:`Top`, :class:`And`, :class:`Or` and :class:`Not`.  The operators
``&``, ``|`` and ``~`` build formulas, so ``Var("a") & ~Var("b")`` works.

Clauses are ``frozenset`` objects of :class:`Literal` read conjunctively;
clause sets are ``frozenset`` objects of clauses read disjunctively (DNF).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import FrozenSet, Iterable, Sequence

from .degrees import as_degree, format_degree


class Formula:
    """Base class; concrete node types are the frozen dataclasses below."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


BOTTOM = Bottom()
TOP = Top()

_PREC = {Or: 1, And: 2, Not: 3}


def format_formula(f: Formula, min_prec: int = 0) -> str:
    """Render ``f`` so that the parser rebuilds exactly the same tree."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bottom):
        return "0"
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Not):
        text = "~" + format_formula(f.arg, 3)
        prec = 3
    elif isinstance(f, (And, Or)):
        prec = _PREC[type(f)]
        op = " & " if isinstance(f, And) else " | "
        # binary operators associate to the left; a same-level right child needs parens
        text = format_formula(f.left, prec) + op + format_formula(f.right, prec + 1)
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if prec < min_prec else text


def variables(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
    return out


def occurrences(f: Formula) -> tuple[set[str], set[str]]:
    """Variables occurring positively and negatively (parity of enclosing negations)."""
    pos: set[str] = set()
    neg: set[str] = set()
    stack = [(f, True)]
    while stack:
        g, polarity = stack.pop()
        if isinstance(g, Var):
            (pos if polarity else neg).add(g.name)
        elif isinstance(g, Not):
            stack.append((g.arg, not polarity))
        elif isinstance(g, (And, Or)):
            stack.extend(((g.left, polarity), (g.right, polarity)))
    return pos, neg


def conjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(And, parts) if parts else TOP


def disjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(Or, parts) if parts else BOTTOM


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


# ---------------------------------------------------------------------------
# Classical decisions
# ---------------------------------------------------------------------------

_TABLE_LIMIT = 16


def _var_pattern(i: int, n: int) -> int:
    """Bitmask over the 2**n assignments with bit j set iff variable i is true in j."""
    block = ((1 << (1 << i)) - 1) << (1 << i)
    period = 1 << (i + 1)
    pattern = block
    width = period
    while width < (1 << n):
        pattern |= pattern << width
        width *= 2
    return pattern


def truth_table(f: Formula, order: Sequence[str]) -> int:
    """Truth table of ``f`` as an int; bit j is the value under assignment j.

    Variable ``order[i]`` is true in assignment j iff bit i of j is set.
    Every variable of ``f`` must appear in ``order``.
    """
    n = len(order)
    full = (1 << (1 << n)) - 1
    patterns = {name: _var_pattern(i, n) for i, name in enumerate(order)}
    memo: dict[Formula, int] = {}

    def ev(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Var):
            r = patterns[g.name]
        elif isinstance(g, Top):
            r = full
        elif isinstance(g, Bottom):
            r = 0
        elif isinstance(g, Not):
            r = full ^ ev(g.arg)
        elif isinstance(g, And):
            r = ev(g.left) & ev(g.right)
        elif isinstance(g, Or):
            r = ev(g.left) | ev(g.right)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = r
        return r

    return ev(f)


def substitute(f: Formula, name: str, value: Formula) -> Formula:
    if isinstance(f, Var):
        return value if f.name == name else f
    if isinstance(f, Not):
        return Not(substitute(f.arg, name, value))
    if isinstance(f, And):
        return And(substitute(f.left, name, value), substitute(f.right, name, value))
    if isinstance(f, Or):
        return Or(substitute(f.left, name, value), substitute(f.right, name, value))
    return f


def is_tautology(f: Formula) -> bool:
    """Exact decision by truth table, with Shannon splitting above 16 variables."""
    vs = sorted(variables(f))
    if len(vs) > _TABLE_LIMIT:
        v = vs[0]
        return is_tautology(substitute(f, v, TOP)) and is_tautology(substitute(f, v, BOTTOM))
    return truth_table(f, vs) == (1 << (1 << len(vs))) - 1


def is_satisfiable(f: Formula) -> bool:
    return not is_tautology(Not(f))


def boolean_equivalent(f1: Formula, f2: Formula) -> bool:
    return is_tautology(implies(f1, f2)) and is_tautology(implies(f2, f1))


# ---------------------------------------------------------------------------
# Literals, clauses, clause sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    name: str
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.name, not self.positive)

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, 0 if self.positive else 1)

    def as_formula(self) -> Formula:
        return Var(self.name) if self.positive else Not(Var(self.name))

    def __str__(self) -> str:
        return self.name if self.positive else "~" + self.name


Clause = FrozenSet[Literal]
ClauseSet = FrozenSet[Clause]


def pos(name: str) -> Literal:
    return Literal(name, True)


def neg(name: str) -> Literal:
    return Literal(name, False)


def clause(*lits: "Literal | str") -> Clause:
    """Build a clause from literals or strings such as ``"a"`` and ``"~b"``."""
    out = []
    for lit in lits:
        if isinstance(lit, str):
            lit = neg(lit[1:]) if lit.startswith("~") else pos(lit)
        out.append(lit)
    return frozenset(out)


def is_consistent(c: Clause) -> bool:
    return not any(lit.negate() in c for lit in c if lit.positive)


def sorted_literals(c: Iterable[Literal]) -> list[Literal]:
    return sorted(c, key=lambda lit: lit.key)


def clause_key(c: Clause) -> tuple:
    return tuple(lit.key for lit in sorted_literals(c))


def sorted_clauses(b: Iterable[Clause]) -> list[Clause]:
    return sorted(b, key=lambda c: (len(c), clause_key(c)))


def clause_vars(c: Clause) -> set[str]:
    return {lit.name for lit in c}


def format_clause(c: Clause) -> str:
    return "{" + ",".join(str(lit) for lit in sorted_literals(c)) + "}"


def format_clause_set(b: Iterable[Clause]) -> str:
    return "{" + ", ".join(format_clause(c) for c in sorted_clauses(b)) + "}"


def clause_formula(c: Clause) -> Formula:
    """Left-nested conjunction of the literals in canonical order; ``{}`` is ⊤."""
    return conjoin(lit.as_formula() for lit in sorted_literals(c))


def clause_set_formula(b: Iterable[Clause]) -> Formula:
    """The formula f(B): left-nested disjunction of clause conjunctions; ``{}`` is ⊥."""
    return disjoin(clause_formula(c) for c in sorted_clauses(b))


def minimize(b: Iterable[Clause]) -> ClauseSet:
    """Drop inconsistent clauses and clauses that strictly include another one."""
    cs = sorted({c for c in b if is_consistent(c)}, key=len)
    kept: list[Clause] = []
    for c in cs:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def _dnf(f: Formula, polarity: bool) -> ClauseSet:
    if isinstance(f, Var):
        return frozenset({frozenset({Literal(f.name, polarity)})})
    if isinstance(f, Top):
        return frozenset({frozenset()}) if polarity else frozenset()
    if isinstance(f, Bottom):
        return frozenset() if polarity else frozenset({frozenset()})
    if isinstance(f, Not):
        return _dnf(f.arg, not polarity)
    if isinstance(f, (And, Or)):
        left = _dnf(f.left, polarity)
        right = _dnf(f.right, polarity)
        conjunctive = isinstance(f, And) == polarity
        if conjunctive:
            return minimize(a | b for a in left for b in right)
        return minimize(left | right)
    raise TypeError(f"not a formula: {f!r}")


def standard_clause_set(f: Formula) -> ClauseSet:
    """Canonical DNF of ``f`` whose literals keep their occurrence polarity in ``f``.

    Negations are pushed to the variables, so a literal ``a`` (``~a``) can only
    appear if ``a`` occurs positively (negatively) in ``f``.  Inconsistent and
    subsumed clauses are removed.
    """
    return _dnf(f, True)


# ---------------------------------------------------------------------------
# Graded implications and basic theories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedImplication:
    antecedent: Formula
    consequent: Formula
    degree: Fraction

    def __post_init__(self):
        object.__setattr__(self, "degree", as_degree(self.degree))

    def variables(self) -> set[str]:
        return variables(self.antecedent) | variables(self.consequent)

    def with_degree(self, degree) -> "GradedImplication":
        return GradedImplication(self.antecedent, self.consequent, degree)

    def __str__(self) -> str:
        return f"{self.antecedent} -> [{format_degree(self.degree)}] {self.consequent}"


Theory = Sequence[GradedImplication]


@dataclass(frozen=True)
class BasicImplication:
    """``⋀antecedent →[degree] f(consequent)`` in normal form.

    ``source`` records the index of the theory element it came from and does
    not take part in equality.
    """

    antecedent: Clause
    consequent: ClauseSet
    degree: Fraction
    source: int = field(default=-1, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "antecedent", frozenset(self.antecedent))
        object.__setattr__(self, "consequent", frozenset(frozenset(c) for c in self.consequent))
        object.__setattr__(self, "degree", as_degree(self.degree))
        if not self.antecedent or not is_consistent(self.antecedent):
            raise ValueError(f"basic antecedent must be a nonempty consistent clause: {format_clause(self.antecedent)}")
        for c in self.consequent:
            if not c or not is_consistent(c):
                raise ValueError(f"basic consequent clauses must be nonempty and consistent: {format_clause(c)}")

    @property
    def consequent_clauses(self) -> list[Clause]:
        return sorted_clauses(self.consequent)

    def variables(self) -> set[str]:
        out = clause_vars(self.antecedent)
        for c in self.consequent:
            out |= clause_vars(c)
        return out

    def literals(self) -> set[Literal]:
        out = set(self.antecedent)
        for c in self.consequent:
            out |= c
        return out

    def as_implication(self) -> GradedImplication:
        return GradedImplication(clause_formula(self.antecedent), clause_set_formula(self.consequent), self.degree)

    def __str__(self) -> str:
        return (f"{format_clause(self.antecedent)} -> [{format_degree(self.degree)}] "
                f"{format_clause_set(self.consequent)}")


BasicTheory = Sequence[BasicImplication]


def basic(antecedent, consequent, degree) -> BasicImplication:
    """Shorthand: ``basic(["a"], [["b", "~c"]], "0.3")``."""
    return BasicImplication(clause(*antecedent), frozenset(clause(*c) for c in consequent), degree)


def flatten(tb: BasicTheory) -> list[GradedImplication]:
    """The basic theory as an ordinary theory, index for index."""
    return [bi.as_implication() for bi in tb]


def basic_theory_variables(tb: BasicTheory) -> set[str]:
    out: set[str] = set()
    for bi in tb:
        out |= bi.variables()
    return out


def to_basic_theory(theory: Theory) -> list[BasicImplication]:
    """Convert a theory to basic implications, recording provenance in ``source``.

    Implications with an unsatisfiable antecedent or a tautological
    consequent are derivable from nothing and are dropped.  Any other
    implication yields one basic implication per clause of the antecedent's
    standard clause set.  An antecedent equivalent to ⊤ is split on the first
    variable of the consequent (or on the fresh variable ``_t0``).
    """
    out: list[BasicImplication] = []
    all_vars: set[str] = set()
    for imp in theory:
        all_vars |= imp.variables()
    fresh = _fresh_name(all_vars)
    for index, imp in enumerate(theory):
        if is_tautology(Not(imp.antecedent)) or is_tautology(imp.consequent):
            continue
        cons = standard_clause_set(imp.consequent)
        for k in sorted_clauses(standard_clause_set(imp.antecedent)):
            if k:
                out.append(BasicImplication(k, cons, imp.degree, index))
                continue
            cons_vars = sorted(variables(imp.consequent))
            split = cons_vars[0] if cons_vars else fresh
            out.append(BasicImplication(frozenset({pos(split)}), cons, imp.degree, index))
            out.append(BasicImplication(frozenset({neg(split)}), cons, imp.degree, index))
    return out


def _fresh_name(taken: set[str]) -> str:
    for i in itertools.count():
        name = f"_t{i}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")
