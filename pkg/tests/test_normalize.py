import random
from fractions import Fraction

import pytest

from laeq.engine import brute_force_degree, entailment_degree, problem_variables
from laeq.forest import STAR, CaseA, CaseB, CaseC, CaseD, ForestBuilder, is_star, verify_forest
from laeq.generate import random_instance, with_fresh_split
from laeq.normalize import (PASSES, NormalizationError, apply_pass, normalize_forest, parse_pass,
                            polarity_is_fresh, purge_polarity)
from laeq.parser import parse_implication
from laeq.rules import forest_to_rule_proof, rule_proof_to_forest
from laeq.syntax import (GradedImplication, Literal, basic, clause, is_consistent, neg, pos,
                         sorted_clauses, standard_clause_set)


def messy(forest, goal, rng):
    """Add a subtree below a ⊛ and a ⊛ sibling under a case A/B node, keeping the proof valid."""
    b = ForestBuilder.from_forest(forest)
    stars = [i for i in b.preorder() if is_star(b.label(i))]
    ends = sorted_clauses(standard_clause_set(goal.consequent))
    if stars and ends:
        b.add(rng.choice(ends), rng.choice(stars), 0)
    ab = [i for i in b.preorder() if isinstance(b.just(i), (CaseA, CaseB)) and b.children(i)
          and not is_star(b.label(b.children(i)[0]))]
    if ab:
        i = rng.choice(ab)
        b.add(STAR, i, b.weight(b.children(i)[0]))
    return b.freeze()


def corpus(n=80, seed=0):
    """(tb, goal, forest) triples from the engine, the oracle, rule-proof round trips and messy variants."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        tb, zeta, eta = random_instance(rng)
        r = entailment_degree(tb, zeta, eta)
        if not r.provable:
            continue
        goal = GradedImplication(zeta, eta, r.degree)
        out.append((tb, goal, r.forest))
        out.append((tb, goal, messy(r.forest, goal, rng)))
        out.append((tb, goal, rule_proof_to_forest(forest_to_rule_proof(r.forest, tb, goal), tb)))
        o = brute_force_degree(tb, zeta, eta, 7)
        if o.provable:
            out.append((tb, goal, o.forest))
    return out


CORPUS = corpus()


def check(tb, goal, before, after):
    b = verify_forest(before, tb, goal)
    a = verify_forest(after, tb, goal)
    assert a.ok, a.violations
    assert a.length <= b.length


class TestExamples:
    @pytest.fixture
    def tb(self):
        return [basic(["a"], [], "0.5"), basic(["a"], [["b"]], "0")]

    def test_prune_improper(self, tb):
        goal = parse_implication("a -> [0] b")
        b = ForestBuilder()
        r = b.add(clause("a"), None, 0, CaseB(0))
        s = b.add(STAR, r, Fraction(1, 2))
        b.add(clause("b"), s, 0)
        f = b.freeze()
        assert verify_forest(f, tb, goal).ok
        g = apply_pass(f, tb, goal, "prune-improper")
        star = next(i for i in g.preorder() if is_star(g[i].label))
        assert g.is_terminal(star)
        check(tb, goal, f, g)

    def test_prune_drops_star_siblings(self, tb):
        goal = parse_implication("a -> [0] b")
        b = ForestBuilder()
        r = b.add(clause("a"), None, 0, CaseA(1))
        b.add(clause("a", "b"), r)
        b.add(STAR, r)
        g = apply_pass(b.freeze(), tb, goal, "prune-improper")
        assert [g[i].label for i in g.children[0]] == [clause("a", "b")]

    def test_cap_inconsistent(self, tb):
        goal = parse_implication("a -> [0] b")
        b = ForestBuilder()
        r = b.add(clause("a"), None, 0, CaseD("b"))
        b.add(clause("a", "b"), r)
        x = b.add(clause("a", "~b"), r, 0, CaseA(1))
        b.add(clause("a", "b", "~b"), x)
        f = b.freeze()
        assert verify_forest(f, tb, goal).ok
        g = apply_pass(f, tb, goal, "cap-inconsistent")
        bad = next(i for i in g.preorder() if g[i].proper and not is_consistent(g[i].label))
        (kid,) = g.children[bad]
        assert is_star(g[kid].label) and g[kid].weight == 0
        assert isinstance(g[bad].just, CaseC)

    def test_fresh_splits(self, tb):
        goal = parse_implication("a & b -> [0] b")
        b = ForestBuilder()
        r = b.add(clause("a", "b"), None, 0, CaseD("b"))
        b.add(clause("b"), r)
        b.add(clause("~b"), r, 0, CaseC())
        f = b.freeze()
        assert not verify_forest(f, tb, goal).ok  # {~b} is consistent, so case C is wrong
        b = ForestBuilder()
        r = b.add(clause("a", "b"), None, 0, CaseD("b"))
        b.add(clause("a", "b"), r)
        x = b.add(clause("~b", "b"), r, 0, CaseC())
        b.add(STAR, x)
        f = b.freeze()
        assert verify_forest(f, tb, goal).ok
        g = apply_pass(f, tb, goal, "fresh-splits")
        assert len(g) == 1
        check(tb, goal, f, g)

    def test_drop_unused(self, tb):
        goal = parse_implication("a & c -> [0] b")
        r = entailment_degree(tb, goal.antecedent, goal.consequent)
        g = apply_pass(r.forest, tb, goal, "drop-unused")
        assert all(lit.name != "c" for i in g.preorder() if g[i].proper and g.children[i] for lit in g[i].label)

    def test_standard_ends(self, tb):
        goal = parse_implication("a -> [0] b")
        b = ForestBuilder()
        r = b.add(clause("a"), None, 0, CaseA(1))
        b.add(clause("a", "b"), r)
        g = apply_pass(b.freeze(), tb, goal, "standard-ends")
        assert [g[i].label for i in g.leaves()] == [clause("b")]

    def test_normal_forest_is_fixed(self, tb):
        goal = parse_implication("a -> [0] b")
        f = normalize_forest(entailment_degree(tb, goal.antecedent, goal.consequent).forest, tb, goal)
        for p in PASSES:
            assert apply_pass(f, tb, goal, p) == f

    def test_rejects_invalid_input(self, tb):
        goal = parse_implication("a -> [0] c")
        b = ForestBuilder()
        b.add(clause("a"))
        with pytest.raises(NormalizationError):
            normalize_forest(b.freeze(), tb, goal)


class TestPurge:
    def test_parse(self):
        assert parse_pass("purge-polarity(x,-)") == Literal("x", False)
        assert parse_pass(" prune-improper ") == "prune-improper"
        with pytest.raises(ValueError):
            parse_pass("purge(x)")

    def test_freshness(self):
        tb = [basic(["a"], [["b"]], "0")]
        goal = parse_implication("a -> [0] b | ~c")
        assert not polarity_is_fresh(pos("a"), tb, goal)
        assert polarity_is_fresh(neg("a"), tb, goal)
        assert polarity_is_fresh(pos("c"), tb, goal)
        assert not polarity_is_fresh(neg("c"), tb, goal)

    def test_refuses_occurring_literal(self):
        tb = [basic(["a"], [["b"]], "0")]
        goal = parse_implication("a -> [0] b")
        f = entailment_degree(tb, goal.antecedent, goal.consequent).forest
        with pytest.raises(NormalizationError):
            purge_polarity(f, tb, goal, pos("a"))

    def test_removes_split_literal(self):
        tb = [basic(["a", "x"], [["b"]], "0.1"), basic(["a"], [["x"], ["b"]], "0")]
        goal = parse_implication("a -> [0.1] b")
        b = ForestBuilder()
        r = b.add(clause("a"), None, 0, CaseD("x"))
        y = b.add(clause("a", "x"), r, 0, CaseB(0))
        b.add(clause("b"), y, Fraction(1, 10))
        z = b.add(clause("a", "~x"), r, 0, CaseA(1))
        u = b.add(clause("a", "x", "~x"), z, 0, CaseC())
        b.add(STAR, u)
        b.add(clause("a", "b", "~x"), z)
        f = b.freeze()
        assert verify_forest(f, tb, goal).ok
        g = purge_polarity(f, tb, goal, neg("x"))
        assert all(neg("x") not in g[i].label for i in g.preorder() if g[i].proper)
        check(tb, goal, f, g)


@pytest.mark.parametrize("tag", PASSES)
def test_pass_over_corpus(tag):
    for tb, goal, f in CORPUS:
        g = apply_pass(f, tb, goal, tag)
        check(tb, goal, f, g)
        assert apply_pass(g, tb, goal, tag) == g


def test_pass_guarantees():
    for tb, goal, f in CORPUS:
        g = apply_pass(f, tb, goal, "prune-improper")
        for i in g.preorder():
            if is_star(g[i].label):
                assert g.is_terminal(i)
                assert g[i].parent is None or len(g.children[g[i].parent]) == 1
        g = apply_pass(f, tb, goal, "cap-inconsistent")
        for i in g.preorder():
            if g[i].proper and not is_consistent(g[i].label):
                (k,) = g.children[i]
                assert is_star(g[k].label)
        g = apply_pass(f, tb, goal, "fresh-splits")
        for i in g.preorder():
            j = g[i].just
            if isinstance(j, CaseD) and g.children[i]:
                assert pos(j.var) not in g[i].label and neg(j.var) not in g[i].label
        if standard_clause_set(goal.antecedent):
            g = apply_pass(f, tb, goal, "standard-ends")
            b_zeta, b_eta = standard_clause_set(goal.antecedent), standard_clause_set(goal.consequent)
            assert len(g.roots) == len(b_zeta)
            # a root that is also a leaf is shrunk to a consequent clause
            assert all(g[r].label in (b_eta if g.is_terminal(r) else b_zeta) for r in g.roots)
            assert all(g[i].label in b_eta for i in g.leaves() if g[i].proper)


def test_purge_over_corpus():
    done = 0
    for tb, goal, f in CORPUS:
        for v in problem_variables(tb, goal.antecedent, goal.consequent):
            for lit in (pos(v), neg(v)):
                if not polarity_is_fresh(lit, tb, goal):
                    continue
                g = purge_polarity(f, tb, goal, lit)
                check(tb, goal, f, g)
                assert all(lit not in g[i].label for i in g.preorder() if g[i].proper)
                assert purge_polarity(g, tb, goal, lit) == g
                done += 1
    assert done > 20


def test_full_normalization_over_corpus():
    for tb, goal, f in CORPUS:
        g = normalize_forest(f, tb, goal)
        check(tb, goal, f, g)
        assert normalize_forest(g, tb, goal) == g


def test_purge_fresh_split():
    for tb, goal, f in CORPUS:
        g = with_fresh_split(f, "z")
        assert verify_forest(g, tb, goal).ok
        for lit in (pos("z"), neg("z")):
            h = purge_polarity(g, tb, goal, lit)
            check(tb, goal, g, h)
            assert all(lit not in h[i].label for i in h.preorder() if h[i].proper)
