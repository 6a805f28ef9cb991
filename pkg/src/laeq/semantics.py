"""Finite quasimetric spaces and the satisfaction of graded implications.

A space stores a dense distance matrix whose entries are exact degrees or
``INF``.  World sets are ``frozenset`` objects of world names.  An
implication ``α →[d] β`` holds in a model when every world of ``α`` is
within distance ``d`` of the set of ``β``-worlds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .degrees import INF, ExtendedDegree, format_degree, is_inf, parse_degree, subset_sums
from .parser import ParseError, strip_comment
from .syntax import (And, Bottom, Formula, GradedImplication, Not, Or, Top, Var,
                     truth_table)

WorldSet = frozenset


@dataclass(frozen=True)
class FiniteQuasimetricSpace:
    worlds: tuple[str, ...]
    dist: tuple[tuple[ExtendedDegree, ...], ...]

    def __post_init__(self):
        n = len(self.worlds)
        if n == 0:
            raise ValueError("a space needs at least one world")
        if len(set(self.worlds)) != n:
            raise ValueError("duplicate world names")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise ValueError("distance matrix must be square over the worlds")

    @classmethod
    def from_entries(cls, worlds: Sequence[str], entries: Mapping[tuple[str, str], ExtendedDegree] = ()):
        """Dense space from sparse entries; missing pairs are 0 on the diagonal, INF elsewhere."""
        worlds = tuple(worlds)
        entries = dict(entries)
        unknown = {w for pair in entries for w in pair} - set(worlds)
        if unknown:
            raise ValueError(f"unknown worlds in distance entries: {sorted(unknown)}")
        rows = []
        for v in worlds:
            row = []
            for w in worlds:
                d = entries.get((v, w), Fraction(0) if v == w else INF)
                row.append(d if is_inf(d) else Fraction(d))
            rows.append(tuple(row))
        return cls(worlds, tuple(rows))

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @property
    def all(self) -> WorldSet:
        return frozenset(self.worlds)

    def q(self, v: str, w: str) -> ExtendedDegree:
        return self.dist[self.index[v]][self.index[w]]


@dataclass(frozen=True)
class SpaceReport:
    m1: list = field(default_factory=list)
    m2: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.m1 and not self.m2


def validate_space(s: FiniteQuasimetricSpace) -> SpaceReport:
    """Collect every pair violating identity of indiscernibles and every triple violating the triangle law."""
    m1, m2 = [], []
    for v in s.worlds:
        for w in s.worlds:
            if (s.q(v, w) == 0) != (v == w):
                m1.append((v, w))
    for v, w, x in itertools.product(s.worlds, repeat=3):
        if s.q(v, x) > s.q(v, w) + s.q(w, x):
            m2.append((v, w, x))
    return SpaceReport(m1, m2)


def point_distance(s: FiniteQuasimetricSpace, a: str, b_set: Iterable[str]) -> ExtendedDegree:
    return min((s.q(a, b) for b in b_set), default=INF)


def neighbourhood(s: FiniteQuasimetricSpace, d: ExtendedDegree, b_set: Iterable[str]) -> WorldSet:
    b_set = frozenset(b_set)
    return frozenset(a for a in s.worlds if point_distance(s, a, b_set) <= d)


def hausdorff(s: FiniteQuasimetricSpace, a_set: Iterable[str], b_set: Iterable[str]) -> ExtendedDegree:
    b_set = frozenset(b_set)
    return max((point_distance(s, a, b_set) for a in a_set), default=Fraction(0))


@dataclass(frozen=True)
class Model:
    space: FiniteQuasimetricSpace
    valuation: Mapping[str, WorldSet] = field(default_factory=dict)

    def __post_init__(self):
        val = {k: frozenset(v) for k, v in dict(self.valuation).items()}
        for name, ws in val.items():
            if not ws <= self.space.all:
                raise ValueError(f"valuation of {name} uses unknown worlds {sorted(ws - self.space.all)}")
        object.__setattr__(self, "valuation", val)

    def __hash__(self):
        return hash((self.space, tuple(sorted(self.valuation.items(), key=lambda kv: kv[0]))))

    def value(self, name: str) -> WorldSet:
        return self.valuation.get(name, frozenset())


def evaluate(m: Model, f: Formula) -> WorldSet:
    if isinstance(f, Var):
        return m.value(f.name)
    if isinstance(f, Top):
        return m.space.all
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return m.space.all - evaluate(m, f.arg)
    if isinstance(f, And):
        return evaluate(m, f.left) & evaluate(m, f.right)
    if isinstance(f, Or):
        return evaluate(m, f.left) | evaluate(m, f.right)
    raise TypeError(f"not a formula: {f!r}")


def satisfies(m: Model, imp: GradedImplication) -> bool:
    return evaluate(m, imp.antecedent) <= neighbourhood(m.space, imp.degree, evaluate(m, imp.consequent))


def implication_distance(m: Model, imp: GradedImplication) -> ExtendedDegree:
    """Hausdorff quasidistance from the antecedent's worlds to the consequent's."""
    return hausdorff(m.space, evaluate(m, imp.antecedent), evaluate(m, imp.consequent))


def similarity_to_distance(s) -> ExtendedDegree:
    """Map a similarity in [0, 1] to a distance by ``-ln s``.

    The endpoints are exact (1 gives 0, 0 gives INF); interior values are
    float approximations.
    """
    s_val = Fraction(s) if not isinstance(s, float) else s
    if not 0 <= s_val <= 1:
        raise ValueError(f"similarity must lie in [0, 1], got {s}")
    if s_val == 0:
        return INF
    if s_val == 1:
        return Fraction(0)
    return -math.log(s_val)


def distance_to_similarity(d) -> float | Fraction:
    if is_inf(d):
        return Fraction(0)
    if d < 0:
        raise ValueError(f"distance must be nonnegative, got {d}")
    if d == 0:
        return Fraction(1)
    return math.exp(-d)


# ---------------------------------------------------------------------------
# Countermodel search
# ---------------------------------------------------------------------------


class SearchBudgetExceeded(RuntimeError):
    pass


def default_degree_pool(theory: Iterable[GradedImplication], goal: GradedImplication) -> list[Fraction]:
    """Sums of theory degrees up to the goal degree, the goal degree, and the next sum above it."""
    degrees = [imp.degree for imp in theory]
    pool = subset_sums(degrees, goal.degree) | {goal.degree}
    above = [s for s in subset_sums(degrees) if s > goal.degree]
    pool.add(min(above) if above else goal.degree + 1)
    return sorted(d for d in pool if d > 0)


def _round_down(x: ExtendedDegree, pool: Sequence[Fraction]) -> Optional[ExtendedDegree]:
    if is_inf(x):
        return INF
    best = None
    for p in pool:
        if p <= x:
            best = p
        else:
            break
    return best


def _greatest_quasimetric(n: int, bounds: dict, pool: Sequence[Fraction]):
    """Pointwise greatest pool-valued quasimetric below ``bounds``, or None.

    Pool-valued matrices obeying the triangle law are closed under pointwise
    maxima, so the greatest one exists whenever any does; tightening
    violated triangles while rounding down into the pool reaches it.
    """
    m = [[Fraction(0) if i == j else INF for j in range(n)] for i in range(n)]
    for (i, j), u in bounds.items():
        r = _round_down(u, pool)
        if r is None:
            return None
        m[i][j] = r
    changed = True
    while changed:
        changed = False
        for w in range(n):
            for v in range(n):
                for x in range(n):
                    if v == x:
                        continue
                    s = m[v][w] + m[w][x]
                    if m[v][x] > s:
                        r = _round_down(s, pool)
                        if r is None:
                            return None
                        m[v][x] = r
                        changed = True
    return m


def find_countermodel(theory: Iterable[GradedImplication], goal: GradedImplication, max_worlds: int = 3,
                      degree_pool: Optional[Iterable] = None, budget: int = 1_000_000) -> Optional[Model]:
    """Smallest finite model satisfying ``theory`` but not ``goal``, or None.

    Worlds are enumerated by count, then by the multiset of truth
    assignments they carry (worlds are interchangeable, so one multiset
    stands for every valuation up to renaming), then by the choice of a
    witnessing world for every theory constraint.  For each choice the
    greatest admissible distance matrix over ``degree_pool ∪ {INF}`` is
    built, which falsifies the goal whenever any admissible matrix does.
    ``None`` means the bounded search was exhausted; it does not prove
    entailment.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    theory = list(theory)
    pool = sorted(Fraction(d) for d in (default_degree_pool(theory, goal) if degree_pool is None else degree_pool)
                  if not is_inf(d) and d > 0)
    names = sorted(set().union(goal.variables(), *(imp.variables() for imp in theory)))
    n_types = 1 << len(names)
    tables = [(truth_table(imp.antecedent, names), truth_table(imp.consequent, names), imp.degree)
              for imp in theory]
    goal_ant = truth_table(goal.antecedent, names)
    goal_cons = truth_table(goal.consequent, names)
    nodes = 0

    for n in range(1, max_worlds + 1):
        for types in itertools.combinations_with_replacement(range(n_types), n):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(f"countermodel search exceeded {budget} nodes")
            worlds = range(n)
            zeta = [i for i in worlds if goal_ant >> types[i] & 1]
            eta = [i for i in worlds if goal_cons >> types[i] & 1]
            if not set(zeta) - set(eta):
                continue
            options = []
            feasible = True
            for ant_t, cons_t, d in tables:
                beta = [j for j in worlds if cons_t >> types[j] & 1]
                for i in worlds:
                    if not ant_t >> types[i] & 1 or i in beta:
                        continue
                    if d == 0 or not beta:
                        feasible = False
                        break
                    options.append([(i, j, d) for j in beta])
                if not feasible:
                    break
            if not feasible:
                continue
            for choice in itertools.product(*options):
                nodes += 1
                if nodes > budget:
                    raise SearchBudgetExceeded(f"countermodel search exceeded {budget} nodes")
                bounds: dict = {}
                for i, j, d in choice:
                    bounds[i, j] = min(bounds.get((i, j), INF), d)
                m = _greatest_quasimetric(n, bounds, pool)
                if m is None:
                    continue
                if not any(all(m[a][b] > goal.degree for b in eta) for a in zeta if a not in eta):
                    continue
                model = _build_model(names, types, m)
                # re-check through the public semantics before handing it out
                if all(satisfies(model, imp) for imp in theory) and not satisfies(model, goal):
                    return model
                raise AssertionError("constructed countermodel failed re-check")  # pragma: no cover
    return None


def _build_model(names, types, m) -> Model:
    worlds = tuple(f"w{i + 1}" for i in range(len(types)))
    space = FiniteQuasimetricSpace(worlds, tuple(tuple(row) for row in m))
    valuation = {name: frozenset(worlds[i] for i, t in enumerate(types) if t >> k & 1)
                 for k, name in enumerate(names)}
    return Model(space, valuation)


# ---------------------------------------------------------------------------
# Space files
# ---------------------------------------------------------------------------


def parse_space(text: str) -> Model:
    """Read ``worlds``, ``q`` and ``var`` lines into a model."""
    worlds = None
    entries: dict = {}
    valuation: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = strip_comment(raw).strip()
        if not body:
            continue
        parts = body.split()
        head = parts[0]
        if head == "worlds":
            if worlds is not None:
                raise ParseError("'worlds' given twice", lineno)
            if len(parts) < 2:
                raise ParseError("'worlds' needs at least one world", lineno)
            worlds = parts[1:]
            continue
        if worlds is None:
            raise ParseError("the 'worlds' line must come first", lineno)
        if head == "q":
            if len(parts) != 4:
                raise ParseError("expected 'q <world> <world> <degree|inf>'", lineno)
            v, w = parts[1], parts[2]
            for x in (v, w):
                if x not in worlds:
                    raise ParseError(f"unknown world {x!r}", lineno)
            try:
                entries[v, w] = parse_degree(parts[3], allow_inf=True)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif head == "var":
            if len(parts) < 3 or parts[2] != ":":
                raise ParseError("expected 'var <name> : <world> ...'", lineno)
            ws = parts[3:]
            for x in ws:
                if x not in worlds:
                    raise ParseError(f"unknown world {x!r}", lineno)
            valuation[parts[1]] = frozenset(ws)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if worlds is None:
        raise ParseError("missing 'worlds' line", 1)
    return Model(FiniteQuasimetricSpace.from_entries(worlds, entries), valuation)


def format_space(model: Model) -> str:
    s = model.space
    lines = ["worlds " + " ".join(s.worlds)]
    for v in s.worlds:
        for w in s.worlds:
            d = s.q(v, w)
            if v != w and not is_inf(d) or v == w and d != 0:
                lines.append(f"q {v} {w} {format_degree(d)}")
    for name in sorted(model.valuation):
        ws = [w for w in s.worlds if w in model.valuation[name]]
        lines.append(f"var {name} : " + " ".join(ws) if ws else f"var {name} :")
    return "\n".join(lines) + "\n"
