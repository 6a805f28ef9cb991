"""Proof forests: data model, length, verification and the text format.

A node is labelled either by a clause or by the improper marker ``STAR``
(⊛, standing for falsity).  Non-terminal clause nodes carry the
justification that licenses their children.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Union

from .degrees import ZERO, as_degree, format_degree, parse_degree
from .parser import ParseError, parse_implication, strip_comment
from .syntax import (BasicImplication, Clause, ClauseSet, GradedImplication, Literal, boolean_equivalent,
                     clause_set_formula, format_clause, format_clause_set, is_consistent, neg, pos,
                     sorted_clauses, standard_clause_set)


class _Star:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STAR"

    def __str__(self):
        return "*"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()
Label = Union[Clause, _Star]


def is_star(label) -> bool:
    return label is STAR


def format_label(label: Label) -> str:
    return "*" if is_star(label) else format_clause(label)


@dataclass(frozen=True)
class CaseA:
    impl: int

    def __str__(self):
        return f"A:{self.impl}"


@dataclass(frozen=True)
class CaseB:
    impl: int

    def __str__(self):
        return f"B:{self.impl}"


@dataclass(frozen=True)
class CaseC:
    def __str__(self):
        return "C"


@dataclass(frozen=True)
class CaseD:
    var: str

    def __str__(self):
        return f"D:{self.var}"


Justification = Union[CaseA, CaseB, CaseC, CaseD]


class ForestError(ValueError):
    """Malformed forest structure or a justification citing a missing implication."""


@dataclass(frozen=True)
class ForestNode:
    id: int
    label: Label
    parent: Optional[int] = None
    weight: Fraction = ZERO
    just: Optional[Justification] = None

    def __post_init__(self):
        if not is_star(self.label):
            object.__setattr__(self, "label", frozenset(self.label))
        object.__setattr__(self, "weight", ZERO if self.parent is None else as_degree(self.weight))

    @property
    def proper(self) -> bool:
        return not is_star(self.label)


@dataclass(frozen=True)
class ProofForest:
    """Immutable forest; node order fixes the order of roots and children."""

    nodes: tuple[ForestNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ForestError("duplicate node ids")
        by_id = {n.id: n for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None and n.parent not in by_id:
                raise ForestError(f"node {n.id}: unknown parent {n.parent}")
            if not n.proper and n.just is not None:
                raise ForestError(f"node {n.id}: an improper node carries no justification")
        for n in self.nodes:
            seen = {n.id}
            p = n.parent
            while p is not None:
                if p in seen:
                    raise ForestError(f"node {n.id}: parent links form a cycle")
                seen.add(p)
                p = by_id[p].parent
        for pid, kids in self.children.items():
            weights = {by_id[k].weight for k in kids}
            if len(weights) > 1:
                raise ForestError(f"node {pid}: edges to its children carry different weights")

    @cached_property
    def by_id(self) -> dict[int, ForestNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                out[n.parent].append(n.id)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def roots(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.parent is None)

    def __getitem__(self, node_id: int) -> ForestNode:
        return self.by_id[node_id]

    def __len__(self) -> int:
        return len(self.nodes)

    def is_terminal(self, node_id: int) -> bool:
        return not self.children[node_id]

    def edge_weight(self, node_id: int) -> Fraction:
        kids = self.children[node_id]
        return self.by_id[kids[0]].weight if kids else ZERO

    def subtree(self, node_id: int) -> list[int]:
        out, stack = [], [node_id]
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(reversed(self.children[i]))
        return out

    def preorder(self) -> list[int]:
        out = []
        for r in self.roots:
            out.extend(self.subtree(r))
        return out

    def leaves(self) -> list[int]:
        return [i for i in self.preorder() if self.is_terminal(i)]

    def justifications(self) -> list[Justification]:
        return [n.just for n in self.nodes if n.just is not None]


class ForestBuilder:
    """Mutable forest under construction; ``freeze`` renumbers in preorder."""

    def __init__(self):
        self._label: dict[int, Label] = {}
        self._parent: dict[int, Optional[int]] = {}
        self._weight: dict[int, Fraction] = {}
        self._just: dict[int, Optional[Justification]] = {}
        self._kids: dict[int, list[int]] = {}
        self._roots: list[int] = []
        self._next = 0

    @classmethod
    def from_forest(cls, forest: ProofForest) -> "ForestBuilder":
        b = cls()
        for r in forest.roots:
            b.graft(forest, r, None)
        return b

    def add(self, label: Label, parent: Optional[int] = None, weight=ZERO,
            just: Optional[Justification] = None) -> int:
        i = self._next
        self._next += 1
        self._label[i] = label if is_star(label) else frozenset(label)
        self._parent[i] = parent
        self._weight[i] = ZERO if parent is None else as_degree(weight)
        self._just[i] = just
        self._kids[i] = []
        if parent is None:
            self._roots.append(i)
        else:
            self._kids[parent].append(i)
        return i

    def graft(self, forest: ProofForest, src: int, parent: Optional[int], weight=None,
              label: Optional[Label] = None) -> int:
        """Copy the subtree of ``forest`` at ``src`` below ``parent``; returns the new id."""
        n = forest[src]
        new = self.add(n.label if label is None else label, parent,
                       n.weight if weight is None else weight, n.just)
        for k in forest.children[src]:
            self.graft(forest, k, new)
        return new

    def graft_children(self, forest: ProofForest, src: int, parent: int, just: Optional[Justification]):
        """Attach copies of the children of ``forest[src]`` below ``parent`` and take over its justification."""
        self._just[parent] = just
        for k in forest.children[src]:
            self.graft(forest, k, parent)

    def remove(self, i: int):
        """Delete node ``i`` and its whole subtree."""
        for k in list(self._kids[i]):
            self.remove(k)
        p = self._parent[i]
        if p is None:
            self._roots.remove(i)
        else:
            self._kids[p].remove(i)
        for d in (self._label, self._parent, self._weight, self._just, self._kids):
            del d[i]

    def clear_children(self, i: int):
        for k in list(self._kids[i]):
            self.remove(k)
        self._just[i] = None

    def splice(self, i: int):
        """Remove node ``i`` only, moving its children up to its parent in its place."""
        p = self._parent[i]
        if p is None:
            raise ForestError("cannot splice a root")
        siblings = self._kids[p]
        pos_ = siblings.index(i)
        kids = self._kids[i]
        siblings[pos_:pos_ + 1] = kids
        for k in kids:
            self._parent[k] = p
        for d in (self._label, self._parent, self._weight, self._just, self._kids):
            del d[i]

    def reparent_children(self, src: int, dst: int):
        for k in self._kids[src]:
            self._parent[k] = dst
        self._kids[dst].extend(self._kids[src])
        self._kids[src] = []

    def label(self, i: int) -> Label:
        return self._label[i]

    def set_label(self, i: int, label: Label):
        self._label[i] = label if is_star(label) else frozenset(label)

    def just(self, i: int) -> Optional[Justification]:
        return self._just[i]

    def set_just(self, i: int, just: Optional[Justification]):
        self._just[i] = just

    def parent(self, i: int) -> Optional[int]:
        return self._parent[i]

    def weight(self, i: int) -> Fraction:
        return self._weight[i]

    def set_weight(self, i: int, w):
        self._weight[i] = as_degree(w)

    def children(self, i: int) -> list[int]:
        return list(self._kids[i])

    @property
    def roots(self) -> list[int]:
        return list(self._roots)

    def __contains__(self, i: int) -> bool:
        return i in self._label

    def preorder(self) -> list[int]:
        out = []

        def walk(i):
            out.append(i)
            for k in self._kids[i]:
                walk(k)

        for r in self._roots:
            walk(r)
        return out

    def freeze(self) -> ProofForest:
        order = self.preorder()
        new_id = {old: k for k, old in enumerate(order)}
        nodes = []
        for old in order:
            p = self._parent[old]
            just = self._just[old] if self._kids[old] else None
            nodes.append(ForestNode(new_id[old], self._label[old], None if p is None else new_id[p],
                                    self._weight[old], just))
        return ProofForest(tuple(nodes))


def canonical(forest: ProofForest) -> ProofForest:
    """Renumber in preorder and drop justifications from terminal nodes."""
    return ForestBuilder.from_forest(forest).freeze()


# ---------------------------------------------------------------------------
# Length and verification
# ---------------------------------------------------------------------------


def _star_free_height(forest: ProofForest, i: int, memo: dict) -> Optional[Fraction]:
    """Largest weight sum over branches below ``i`` avoiding ⊛, or None if every branch meets ⊛."""
    if i in memo:
        return memo[i]
    n = forest[i]
    if not n.proper:
        out = None
    elif forest.is_terminal(i):
        out = ZERO
    else:
        vals = []
        for k in forest.children[i]:
            h = _star_free_height(forest, k, memo)
            if h is not None:
                vals.append(forest[k].weight + h)
        out = max(vals) if vals else None
    memo[i] = out
    return out


def forest_length(forest: ProofForest) -> Fraction:
    memo: dict = {}
    vals = [_star_free_height(forest, r, memo) for r in forest.roots]
    return max((v for v in vals if v is not None), default=ZERO)


@dataclass(frozen=True)
class Violation:
    node: Optional[int]
    tag: str
    message: str

    def __str__(self):
        where = "forest" if self.node is None else f"node {self.node}"
        return f"{self.tag} at {where}: {self.message}"


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    length: Fraction
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _impl(tb, k: int, node: int) -> BasicImplication:
    if not 0 <= k < len(tb):
        raise ForestError(f"node {node}: justification cites implication {k}, theory has {len(tb)}")
    return tb[k]


def check_node(forest: ProofForest, tb, i: int) -> list[Violation]:
    """T4 conditions at a single non-terminal clause node."""
    n = forest[i]
    label = n.label
    kids = [forest[k] for k in forest.children[i]]
    c = kids[0].weight
    proper = [k for k in kids if k.proper]
    just = n.just
    out: list[Violation] = []

    def bad(tag, msg):
        out.append(Violation(i, tag, msg))

    if just is None:
        bad("T4", "non-terminal clause without justification")
    elif isinstance(just, (CaseA, CaseB)):
        tag = "T4-A" if isinstance(just, CaseA) else "T4-B"
        bi = _impl(tb, just.impl, i)
        if isinstance(just, CaseA):
            if c != 0:
                bad(tag, f"edge weight {format_degree(c)} must be 0")
            if bi.degree != 0:
                bad(tag, f"implication {just.impl} has degree {format_degree(bi.degree)}, case A needs 0")
        else:
            if bi.degree == 0:
                bad(tag, f"implication {just.impl} has degree 0, case B needs a positive degree")
            elif c != bi.degree:
                bad(tag, f"edge weight {format_degree(c)} differs from degree {format_degree(bi.degree)}")
        if not bi.antecedent <= label:
            bad(tag, f"antecedent {format_clause(bi.antecedent)} is not contained in the node")
        if not bi.consequent:
            if len(kids) != 1 or kids[0].proper:
                bad(tag, "an implication with consequent ⊥ needs the single child *")
        else:
            for m in bi.consequent_clauses:
                allowed = m | label if isinstance(just, CaseA) else m
                if not any(k.label <= allowed for k in proper):
                    bad(tag, f"no child is contained in {format_clause(allowed)}")
    elif isinstance(just, CaseC):
        if c != 0:
            bad("T4-C", f"edge weight {format_degree(c)} must be 0")
        if is_consistent(label):
            bad("T4-C", "the node is consistent")
        if len(kids) != 1 or kids[0].proper:
            bad("T4-C", "case C needs the single child *")
    elif isinstance(just, CaseD):
        if c != 0:
            bad("T4-D", f"edge weight {format_degree(c)} must be 0")
        p, q = pos(just.var), neg(just.var)
        ok = len(kids) == 2 and len(proper) == 2
        if ok:
            a, b = proper
            ok = any(x.label - {lp} <= label and lp in x.label and y.label - {lq} <= label and lq in y.label
                     for (x, y), (lp, lq) in (((a, b), (p, q)), ((b, a), (p, q))))
        if not ok:
            bad("T4-D", f"case D on {just.var} needs exactly two children {{{p},...}} and {{{q},...}} "
                        "whose other literals belong to the node")
    else:
        raise ForestError(f"node {i}: unknown justification {just!r}")
    return out


def verify_forest(forest: ProofForest, tb, goal: GradedImplication,
                  b_zeta: Optional[Iterable[Clause]] = None,
                  b_eta: Optional[Iterable[Clause]] = None) -> VerificationReport:
    """Check T1 to T4 for ``forest`` as a proof of ``goal`` from the basic theory ``tb``.

    ``B_ζ`` and ``B_η`` default to the standard clause sets of the goal's
    sides; explicitly supplied sets must be Boolean equivalent to them.
    """
    length = forest_length(forest)
    violations: list[Violation] = []
    if b_zeta is None:
        bz = standard_clause_set(goal.antecedent)
    else:
        bz = frozenset(frozenset(c) for c in b_zeta)
        if not boolean_equivalent(clause_set_formula(bz), goal.antecedent):
            violations.append(Violation(None, "T1", f"{format_clause_set(bz)} is not a clause set for the antecedent"))
    if b_eta is None:
        be = standard_clause_set(goal.consequent)
    else:
        be = frozenset(frozenset(c) for c in b_eta)
        if not boolean_equivalent(clause_set_formula(be), goal.consequent):
            violations.append(Violation(None, "T2", f"{format_clause_set(be)} is not a clause set for the consequent"))
    if not bz and not violations:
        # an unsatisfiable antecedent is proved by any forest
        return VerificationReport(True, length, [])

    root_labels = [forest[r].label for r in forest.roots if forest[r].proper]
    for k in sorted_clauses(bz):
        if not any(r <= k for r in root_labels):
            violations.append(Violation(None, "T1", f"no root is contained in {format_clause(k)}"))
    for i in forest.preorder():
        n = forest[i]
        if not n.proper:
            continue
        if forest.is_terminal(i):
            if not any(m <= n.label for m in be):
                violations.append(Violation(i, "T2", f"leaf {format_clause(n.label)} includes no clause of "
                                                      f"{format_clause_set(be)}"))
        else:
            violations.extend(check_node(forest, tb, i))
    if length > goal.degree:
        violations.append(Violation(None, "T3", f"length {format_degree(length)} exceeds "
                                                f"{format_degree(goal.degree)}"))
    return VerificationReport(not violations, length, violations)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForestFile:
    forest: ProofForest
    goal: Optional[GradedImplication] = None
    b_zeta: Optional[ClauseSet] = None
    b_eta: Optional[ClauseSet] = None


_CLAUSE = re.compile(r"\{([^{}]*)\}")
_NODE = re.compile(r"^node\s+(\d+)\s+(\{[^{}]*\}|\*)\s*(.*)$")


def parse_clause(text: str) -> Clause:
    m = _CLAUSE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"not a clause: {text!r}")
    lits = []
    for part in m.group(1).split(","):
        part = part.strip()
        if not part:
            continue
        name = part[1:] if part.startswith("~") else part
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ValueError(f"bad literal {part!r}")
        lits.append(Literal(name, not part.startswith("~")))
    return frozenset(lits)


def parse_clause_set(text: str) -> ClauseSet:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"not a clause set: {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    found = _CLAUSE.findall(inner)
    rest = _CLAUSE.sub("", inner).replace(",", "").strip()
    if rest:
        raise ValueError(f"not a clause set: {text!r}")
    return frozenset(parse_clause("{" + c + "}") for c in found)


def _parse_just(text: str) -> Optional[Justification]:
    if text == "leaf":
        return None
    if text == "C":
        return CaseC()
    kind, _, arg = text.partition(":")
    if kind in ("A", "B") and arg.isdigit():
        return CaseA(int(arg)) if kind == "A" else CaseB(int(arg))
    if kind == "D" and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", arg):
        return CaseD(arg)
    raise ValueError(f"bad justification {text!r}")


def parse_forest(text: str) -> ForestFile:
    """Read the line-oriented forest format (see ``format_forest``)."""
    nodes = []
    goal = b_zeta = b_eta = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = strip_comment(raw).strip()
        if not body:
            continue
        try:
            if body.startswith("goal:"):
                goal = parse_implication(body[5:])
                continue
            if body.startswith("b_zeta:"):
                b_zeta = parse_clause_set(body[7:])
                continue
            if body.startswith("b_eta:"):
                b_eta = parse_clause_set(body[6:])
                continue
            m = _NODE.match(body)
            if not m:
                raise ValueError("expected 'node <id> <label> root|parent=<id> w=<degree> just=<...>'")
            node_id = int(m.group(1))
            label = STAR if m.group(2) == "*" else parse_clause(m.group(2))
            parent, weight, just = None, ZERO, None
            for field_ in m.group(3).split():
                key, _, val = field_.partition("=")
                if key == "root" and not val:
                    parent = None
                elif key == "parent":
                    parent = int(val)
                elif key == "w":
                    weight = parse_degree(val)
                elif key == "just":
                    just = _parse_just(val)
                else:
                    raise ValueError(f"unknown field {field_!r}")
            nodes.append(ForestNode(node_id, label, parent, weight, just))
        except ParseError as exc:
            raise ParseError(exc.message, lineno, exc.column) from None
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        forest = ProofForest(tuple(nodes))
    except ForestError as exc:
        raise ParseError(str(exc), 1) from None
    return ForestFile(forest, goal, b_zeta, b_eta)


def format_forest(forest: ProofForest, goal: Optional[GradedImplication] = None,
                  b_zeta: Optional[ClauseSet] = None, b_eta: Optional[ClauseSet] = None) -> str:
    lines = []
    if goal is not None:
        lines.append(f"goal: {goal}")
    if b_zeta is not None:
        lines.append(f"b_zeta: {format_clause_set(b_zeta)}")
    if b_eta is not None:
        lines.append(f"b_eta: {format_clause_set(b_eta)}")
    for i in forest.preorder():
        n = forest[i]
        where = "root" if n.parent is None else f"parent={n.parent}"
        just = "leaf" if n.just is None or forest.is_terminal(i) else str(n.just)
        lines.append(f"node {n.id} {format_label(n.label)} {where} w={format_degree(n.weight)} just={just}")
    return "\n".join(lines) + "\n"


def render_forest(forest: ProofForest) -> str:
    """ASCII drawing, one node per line."""
    lines: list[str] = []

    def walk(i, prefix, last, top):
        n = forest[i]
        text = format_label(n.label)
        if not top:
            text += f"  w={format_degree(n.weight)}"
        if n.just is not None and not forest.is_terminal(i):
            text += f"  [{n.just}]"
        if top:
            lines.append(text)
            child_prefix = ""
        else:
            lines.append(prefix + ("`- " if last else "+- ") + text)
            child_prefix = prefix + ("   " if last else "|  ")
        kids = forest.children[i]
        for j, k in enumerate(kids):
            walk(k, child_prefix, j == len(kids) - 1, False)

    for r in forest.roots:
        walk(r, "", True, True)
    return "\n".join(lines) + ("\n" if lines else "")
