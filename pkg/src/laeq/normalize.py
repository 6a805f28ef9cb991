"""Normal-form transformations on forest proofs.

Every pass takes a forest proof of ``goal`` from ``tb`` and returns another
one of no greater length.  Passes are named by tags:

``prune-improper``
    ⊛ nodes become terminal, and a ⊛ next to a proper sibling is dropped.
``cap-inconsistent``
    every inconsistent clause gets ⊛ as its only child, at weight 0.
``fresh-splits``
    no case-D node splits on a variable it already contains.
``standard-ends``
    roots are the clauses of the antecedent's standard clause set and leaves
    are clauses of the consequent's.
``drop-unused``
    no node keeps a literal its justification does not need.
``purge-polarity(φ,±)``
    removes the literal ``φ`` (``+``) or ``~φ`` (``-``) when that polarity
    occurs neither in the goal nor in the theory.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional, Sequence

from .forest import (STAR, CaseA, CaseB, CaseC, CaseD, ForestBuilder, ProofForest, canonical, is_star,
                     verify_forest)
from .syntax import (BasicImplication, GradedImplication, Literal, is_consistent, neg, occurrences, pos,
                     sorted_clauses, sorted_literals, standard_clause_set)

PASSES = ("prune-improper", "cap-inconsistent", "fresh-splits", "standard-ends", "drop-unused")
FULL = PASSES


class NormalizationError(ValueError):
    pass


def _labels(b: ForestBuilder, ids) -> list:
    return [b.label(k) for k in ids]


def _d_valid(b: ForestBuilder, i: int, var: str) -> bool:
    kids = b.children(i)
    if len(kids) != 2 or any(is_star(b.label(k)) for k in kids):
        return False
    label = b.label(i)
    p, q = pos(var), neg(var)
    x, y = _labels(b, kids)
    return any(p in u and u - {p} <= label and q in v and v - {q} <= label for u, v in ((x, y), (y, x)))


# ---------------------------------------------------------------------------
# Individual passes
# ---------------------------------------------------------------------------


def prune_improper(forest: ProofForest) -> ProofForest:
    b = ForestBuilder.from_forest(forest)
    for i in b.preorder():
        if i in b and is_star(b.label(i)):
            b.clear_children(i)
    for i in b.preorder():
        if i not in b:
            continue
        kids = b.children(i)
        stars = [k for k in kids if is_star(b.label(k))]
        if not stars or len(kids) == 1:
            continue
        extra = stars if len(stars) < len(kids) else stars[1:]
        for k in extra:
            b.remove(k)
    return b.freeze()


def cap_inconsistent(forest: ProofForest) -> ProofForest:
    b = ForestBuilder.from_forest(forest)
    for i in b.preorder():
        if i not in b or is_star(b.label(i)) or is_consistent(b.label(i)):
            continue
        kids = b.children(i)
        if len(kids) == 1 and is_star(b.label(kids[0])) and b.weight(kids[0]) == 0:
            continue
        b.clear_children(i)
        b.add(STAR, i, 0)
        b.set_just(i, CaseC())
    return b.freeze()


def fresh_splits(forest: ProofForest) -> ProofForest:
    b = ForestBuilder.from_forest(forest)
    changed = True
    while changed:
        changed = False
        for i in b.preorder():
            if i not in b:
                continue
            just = b.just(i)
            if not isinstance(just, CaseD) or not b.children(i):
                continue
            label = b.label(i)
            present = [lit for lit in (pos(just.var), neg(just.var)) if lit in label]
            if not present:
                continue
            keep = next(k for k in b.children(i) if present[0] in b.label(k))
            for k in b.children(i):
                if k != keep:
                    b.remove(k)
            new_just = b.just(keep) if b.children(keep) else None
            b.splice(keep)
            b.set_just(i, new_just)
            changed = True
            break
    return b.freeze()


def standard_ends(forest: ProofForest, goal: GradedImplication) -> ProofForest:
    b_zeta = standard_clause_set(goal.antecedent)
    if not b_zeta:
        return canonical(forest)
    b_eta = sorted_clauses(standard_clause_set(goal.consequent))
    b = ForestBuilder()
    for k in sorted_clauses(b_zeta):
        root = next((r for r in forest.roots if forest[r].proper and forest[r].label <= k), None)
        if root is None:
            raise NormalizationError(f"no root below {sorted_literals(k)}")
        nid = b.add(k)
        b.graft_children(forest, root, nid, forest[root].just)

    def shrink(i: int):
        label = b.label(i)
        m = next((m for m in b_eta if m <= label), None)
        if m is None:
            raise NormalizationError("a leaf includes no clause of the consequent")
        if m == label:
            return
        b.set_label(i, m)
        p = b.parent(i)
        if p is not None and isinstance(b.just(p), CaseD) and not _d_valid(b, p, b.just(p).var):
            b.clear_children(p)
            shrink(p)

    for i in b.preorder():
        if i in b and not b.children(i) and not is_star(b.label(i)):
            shrink(i)
    return b.freeze()


def _is_unused(b: ForestBuilder, tb: Sequence[BasicImplication], i: int, lam: Literal) -> bool:
    label = b.label(i)
    just = b.just(i)
    kids = b.children(i)
    rest = label - {lam}
    if isinstance(just, (CaseA, CaseB)):
        bi = tb[just.impl]
        if lam in bi.antecedent:
            return False
        if isinstance(just, CaseB):
            return True
        proper = [b.label(k) for k in kids if not is_star(b.label(k))]
        return all(any(c <= m | rest for c in proper) for m in bi.consequent)
    if isinstance(just, CaseC):
        return not is_consistent(rest)
    if isinstance(just, CaseD):
        return not any(lam in b.label(k) for k in kids)
    return False


def drop_unused(forest: ProofForest, tb: Sequence[BasicImplication]) -> ProofForest:
    b = ForestBuilder.from_forest(forest)
    while True:
        hit = None
        for i in b.preorder():
            if is_star(b.label(i)) or not b.children(i):
                continue
            lam = next((lam for lam in sorted_literals(b.label(i)) if _is_unused(b, tb, i, lam)), None)
            if lam is not None:
                hit = (i, lam)
                break
        if hit is None:
            return b.freeze()
        i, lam = hit
        b.set_label(i, b.label(i) - {lam})
        p = b.parent(i)
        if p is not None and isinstance(b.just(p), CaseD) and not _d_valid(b, p, b.just(p).var):
            if not b.label(i) <= b.label(p):
                raise NormalizationError("case-D repair needs the shrunk child inside its father")
            for k in b.children(p):
                if k != i:
                    b.remove(k)
            just = b.just(i)
            b.splice(i)
            b.set_just(p, just)


# ---------------------------------------------------------------------------
# Literal elimination
# ---------------------------------------------------------------------------


def polarity_is_fresh(lit: Literal, tb: Sequence[BasicImplication], goal: GradedImplication) -> bool:
    """True when ``lit`` occurs neither in ``tb`` nor, with its polarity, in the goal."""
    for side in (goal.antecedent, goal.consequent):
        positive, negative = occurrences(side)
        if lit.name in (positive if lit.positive else negative):
            return False
    return not any(lit in bi.literals() for bi in tb)


def _contains(forest: ProofForest, lit: Literal) -> bool:
    return any(n.proper and lit in n.label for n in forest.nodes)


def _tidy(forest: ProofForest, tb, goal) -> ProofForest:
    """Bring a forest to the shape the elimination step relies on."""
    forest = standard_ends(prune_improper(forest), goal)
    for _ in range(10_000):
        nxt = drop_unused(fresh_splits(cap_inconsistent(forest)), tb)
        if nxt == forest:
            return forest
        forest = nxt
    raise NormalizationError("normalization did not stabilise")  # pragma: no cover


def _eliminate_once(forest: ProofForest, lit: Literal) -> ProofForest:
    f = canonical(forest)
    intro = [i for i in f.preorder()
             if f[i].proper and f.children[i] and lit not in f[i].label
             and any(f[k].proper and lit in f[k].label for k in f.children[i])]
    top = intro[-1]  # nothing after it in preorder lies below it and introduces the literal
    just = f[top].just
    if not isinstance(just, CaseD) or just.var != lit.name:
        raise NormalizationError(f"node {top} introduces {lit} without splitting on {lit.name}")
    l1 = next(k for k in f.children[top] if lit.negate() in f[k].label)
    l2 = next(k for k in f.children[top] if k != l1)
    region, stack = [], [l2]
    while stack:
        i = stack.pop()
        region.append(i)
        stack.extend(k for k in f.children[i] if f[k].proper and lit in f[k].label)
    region_set = set(region)
    base = f[top].label

    b = ForestBuilder.from_forest(f)  # canonical input keeps node ids
    b.remove(l1)
    for i in region:
        b.set_label(i, (f[i].label - {lit}) | base)
    for i in region:
        if any(k in region_set for k in f.children[i]):
            continue
        if not isinstance(f[i].just, CaseC) or not f[l1].label <= b.label(i):
            raise NormalizationError(f"node {i} drops {lit} in an unexpected way")
        b.clear_children(i)
        b.graft_children(f, l1, i, f[l1].just)
    new_just = b.just(l2) if b.children(l2) else None
    b.splice(l2)
    b.set_just(top, new_just)
    return b.freeze()


def purge_polarity(forest: ProofForest, tb: Sequence[BasicImplication], goal: GradedImplication,
                   lit: Literal) -> ProofForest:
    if not polarity_is_fresh(lit, tb, goal):
        raise NormalizationError(f"the literal {lit} occurs in the goal or the theory")
    forest = canonical(forest)
    if not _contains(forest, lit):
        return forest
    forest = _tidy(forest, tb, goal)
    for _ in range(10_000):
        if not _contains(forest, lit):
            return forest
        forest = _tidy(_eliminate_once(forest, lit), tb, goal)
    raise NormalizationError("literal elimination did not terminate")  # pragma: no cover


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

_PURGE = re.compile(r"purge-polarity\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*,\s*([+-])\s*\)")


def parse_pass(tag: str):
    tag = tag.strip()
    if tag in PASSES:
        return tag
    m = _PURGE.fullmatch(tag)
    if m:
        return Literal(m.group(1), m.group(2) == "+")
    raise ValueError(f"unknown normalization pass {tag!r}")


def apply_pass(forest: ProofForest, tb, goal: GradedImplication, tag) -> ProofForest:
    step = parse_pass(tag) if isinstance(tag, str) else tag
    if isinstance(step, Literal):
        return purge_polarity(forest, tb, goal, step)
    if step == "prune-improper":
        return prune_improper(forest)
    if step == "cap-inconsistent":
        return cap_inconsistent(forest)
    if step == "fresh-splits":
        return fresh_splits(forest)
    if step == "standard-ends":
        return standard_ends(forest, goal)
    if step == "drop-unused":
        return drop_unused(forest, tb)
    raise ValueError(f"unknown normalization pass {tag!r}")  # pragma: no cover


def normalize_forest(forest: ProofForest, tb: Sequence[BasicImplication], goal: GradedImplication,
                     passes: Optional[Iterable] = None) -> ProofForest:
    """Apply ``passes`` in order (all structural passes by default).

    The input must verify; so does the output, with no greater length.
    """
    report = verify_forest(forest, tb, goal)
    if not report.ok:
        raise NormalizationError("input is not a forest proof of the goal: "
                                 + "; ".join(str(v) for v in report.violations))
    steps = [parse_pass(t) if isinstance(t, str) else t for t in (FULL if passes is None else passes)]
    out = canonical(forest)
    for step in steps:
        out = apply_pass(out, tb, goal, step)
    if passes is None:
        for _ in range(10_000):
            nxt = drop_unused(out, tb)
            if nxt == out:
                break
            out = nxt
    after = verify_forest(out, tb, goal)
    if not after.ok or after.length > report.length:
        raise NormalizationError("normalization produced an invalid forest: "
                                 + "; ".join(str(v) for v in after.violations))  # pragma: no cover
    return out
