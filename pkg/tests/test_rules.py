import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laeq.engine import entailment_degree
from laeq.forest import STAR, verify_forest
from laeq.generate import random_basic_theory, random_instance, random_rule_proof
from laeq.parser import ParseError, parse_formula, parse_implication
from laeq.rules import (R1, R2, R3, R4, R5, R6, Axiom, R5Prime, RuleStep, check_rule_proof, forest_to_rule_proof,
                        format_rule_proof, from_lae_prime, parse_rule_proof, rule_proof_to_forest, to_lae_prime)
from laeq.syntax import GradedImplication, basic, clause, flatten

I = parse_implication


def steps(*pairs):
    return [RuleStep(i, I(text), rule) for i, (text, rule) in enumerate(pairs)]


@pytest.fixture
def chain_tb():
    return [basic(["a"], [["b"]], "0.1"), basic(["b"], [["c"]], "0.2")]


@pytest.fixture
def chain_proof():
    return steps(("a -> [0.1] b", Axiom(0)), ("b -> [0.2] c", Axiom(1)), ("a -> [0.3] c", R6(0, 1)))


def messages(report):
    return [v.message for v in report.violations]


class TestChecker:
    def test_non_tautology(self):
        r = check_rule_proof(steps(("a -> [0] b", R1())), [])
        assert not r.ok
        assert r.violations[0].index == 0

    def test_chain(self, chain_tb, chain_proof):
        r = check_rule_proof(chain_proof, flatten(chain_tb))
        assert r.ok
        assert r.conclusion == I("a -> [0.3] c")

    def test_r4(self):
        p = steps(("a -> [0.3] 0", Axiom(0)), ("a -> [0] 0", R4(0)))
        assert check_rule_proof(p, [I("a -> [0.3] 0")]).ok

    def test_axiom_mismatch(self):
        assert not check_rule_proof(steps(("a -> [0.2] b", Axiom(0))), [I("a -> [0.1] b")]).ok
        assert not check_rule_proof(steps(("a -> [0.1] b", Axiom(3))), [I("a -> [0.1] b")]).ok

    def test_r1_degree(self):
        assert not check_rule_proof(steps(("a -> [0.1] a | b", R1())), []).ok

    def test_r2(self):
        gamma = parse_formula("c | d")
        ok = steps(("a -> [0] a | b", R1()), ("a & (c | d) -> [0] (a | b) & (c | d)", R2(0, gamma)))
        assert check_rule_proof(ok, []).ok
        swapped = steps(("a -> [0] a | b", R1()), ("(c | d) & a -> [0] (a | b) & (c | d)", R2(0, gamma)))
        assert not check_rule_proof(swapped, []).ok
        graded = steps(("a -> [0.1] b", Axiom(0)), ("a & c -> [0] b & c", R2(0, parse_formula("c"))))
        assert not check_rule_proof(graded, [I("a -> [0.1] b")]).ok

    def test_r3(self):
        p = steps(("a -> [0.1] b", Axiom(0)), ("a -> [0.4] b", R3(0)))
        assert check_rule_proof(p, [I("a -> [0.1] b")]).ok
        p = steps(("a -> [0.1] b", Axiom(0)), ("a -> [0.05] b", R3(0)))
        assert not check_rule_proof(p, [I("a -> [0.1] b")]).ok

    def test_r4_needs_bottom(self):
        p = steps(("a -> [0.3] b", Axiom(0)), ("a -> [0] 0", R4(0)))
        assert not check_rule_proof(p, [I("a -> [0.3] b")]).ok

    def test_r5(self):
        t = [I("a -> [0.1] c"), I("b -> [0.1] c"), I("b -> [0.2] c")]
        ok = steps(("a -> [0.1] c", Axiom(0)), ("b -> [0.1] c", Axiom(1)), ("a | b -> [0.1] c", R5(0, 1)))
        assert check_rule_proof(ok, t).ok
        uneven = steps(("a -> [0.1] c", Axiom(0)), ("b -> [0.2] c", Axiom(2)), ("a | b -> [0.2] c", R5(0, 1)))
        assert not check_rule_proof(uneven, t).ok
        assert check_rule_proof([*uneven[:2], RuleStep(2, I("a | b -> [0.2] c"), R5Prime(0, 1))], t,
                                r5_prime=True).ok

    def test_r6_needs_syntactic_middle(self):
        t = [I("a -> [0.1] b | c"), I("c | b -> [0.2] d")]
        p = steps(("a -> [0.1] b | c", Axiom(0)), ("c | b -> [0.2] d", Axiom(1)), ("a -> [0.3] d", R6(0, 1)))
        assert not check_rule_proof(p, t).ok

    def test_r6_degree_is_sum(self, chain_tb):
        p = steps(("a -> [0.1] b", Axiom(0)), ("b -> [0.2] c", Axiom(1)), ("a -> [0.2] c", R6(0, 1)))
        assert not check_rule_proof(p, flatten(chain_tb)).ok

    def test_premise_must_precede(self):
        p = steps(("a -> [0] a", R3(0)))
        assert "does not precede" in messages(check_rule_proof(p, []))[0]

    def test_step_numbering(self):
        p = [RuleStep(5, I("a -> [0] a"), R1())]
        assert not check_rule_proof(p, []).ok

    def test_calculus_variants(self):
        p = steps(("a -> [0] a", R1()), ("a -> [0.1] a", R3(0)))
        assert check_rule_proof(p, []).ok
        assert not check_rule_proof(p, [], r5_prime=True).ok


class TestForestToProof:
    def test_worked_example(self, example_basic, example_goal):
        r = entailment_degree(example_basic, example_goal.antecedent, example_goal.consequent)
        proof = forest_to_rule_proof(r.forest, example_basic, example_goal)
        report = check_rule_proof(proof, flatten(example_basic))
        assert report.ok, report.violations
        assert report.conclusion == example_goal
        used = {type(s.rule).__name__ for s in proof}
        assert {"Axiom", "R1", "R2", "R5", "R6"} <= used

    def test_single_leaf(self):
        r = entailment_degree([], parse_formula("a"), parse_formula("a"))
        proof = forest_to_rule_proof(r.forest, [], I("a -> [0] a"))
        assert len(proof) <= 2
        assert proof[-1].conclusion == I("a -> [0] a")

    def test_inconsistent_antecedent(self):
        goal = I("a & ~a -> [0.2] b")
        r = entailment_degree([], goal.antecedent, goal.consequent)
        proof = forest_to_rule_proof(r.forest, [], goal)
        assert [type(s.rule) for s in proof] == [R1, R3]
        assert check_rule_proof(proof, []).conclusion == goal

    def test_slack_degree_uses_r3(self, chain_tb):
        goal = I("a -> [1] c")
        r = entailment_degree(chain_tb, goal.antecedent, goal.consequent)
        proof = forest_to_rule_proof(r.forest, chain_tb, goal)
        assert check_rule_proof(proof, flatten(chain_tb)).conclusion == goal

    def test_rejects_invalid_forest(self, example_basic, example_goal):
        r = entailment_degree(example_basic, example_goal.antecedent, example_goal.consequent)
        with pytest.raises(ValueError):
            forest_to_rule_proof(r.forest, example_basic, example_goal.with_degree(Fraction(1, 10)))


class TestProofToForest:
    def test_chain(self, chain_tb, chain_proof):
        f = rule_proof_to_forest(chain_proof, chain_tb)
        r = verify_forest(f, chain_tb, I("a -> [0.3] c"))
        assert r.ok and r.length == Fraction(3, 10)

    def test_r1_is_isolated_node(self):
        f = rule_proof_to_forest(steps(("a -> [0] a", R1())), [])
        assert len(f) == 1 and f[0].label == clause("a")

    def test_r4_leaves_are_stars(self):
        tb = [basic(["a"], [], "0.3")]
        p = steps(("a -> [0.3] 0", Axiom(0)), ("a -> [0] 0", R4(0)))
        f = rule_proof_to_forest(p, tb)
        assert all(f[i].label is STAR for i in f.leaves())
        assert verify_forest(f, tb, I("a -> [0] 0")).ok

    def test_r1_with_case_splits(self):
        goal = I("a -> [0] a & b | a & ~b")
        f = rule_proof_to_forest(steps((str(goal), R1())), [])
        assert verify_forest(f, [], goal).ok
        assert len(f) == 3

    def test_r2(self):
        tb = [basic(["a"], [["b"]], "0")]
        gamma = parse_formula("c | ~b")
        p = steps(("a -> [0] b", Axiom(0)), ("a & (c | ~b) -> [0] b & (c | ~b)", R2(0, gamma)))
        f = rule_proof_to_forest(p, tb)
        assert verify_forest(f, tb, p[-1].conclusion).ok

    def test_r5_is_union(self):
        tb = [basic(["a"], [["b"]], "0.1")]
        p = steps(("a -> [0.1] b", Axiom(0)), ("b -> [0] b", R1()), ("b -> [0.1] b", R3(1)),
                  ("a | b -> [0.1] b", R5(0, 2)))
        f = rule_proof_to_forest(p, tb)
        assert len(f.roots) == 2
        assert verify_forest(f, tb, p[-1].conclusion).ok

    def test_rejects_bad_proof(self):
        with pytest.raises(ValueError):
            rule_proof_to_forest(steps(("a -> [0] b", R1())), [])


class TestPrimeCalculus:
    def test_drop_r3(self):
        t = [I("a -> [0.1] c"), I("b -> [0.2] c")]
        p = steps(("a -> [0.1] c", Axiom(0)), ("a -> [0.2] c", R3(0)), ("b -> [0.2] c", Axiom(1)),
                  ("a | b -> [0.2] c", R5(1, 2)))
        q = to_lae_prime(p)
        assert check_rule_proof(q, t, r5_prime=True).ok
        assert [type(s.rule) for s in q] == [Axiom, Axiom, R5Prime]
        back = from_lae_prime(q)
        assert check_rule_proof(back, t).ok
        assert back[-1].conclusion == p[-1].conclusion

    def test_degrees_only_drop(self):
        t = [I("a -> [0.1] b"), I("b -> [0.1] c")]
        p = steps(("a -> [0.1] b", Axiom(0)), ("a -> [0.5] b", R3(0)), ("b -> [0.1] c", Axiom(1)),
                  ("a -> [0.6] c", R6(1, 2)))
        q = to_lae_prime(p)
        assert q[-1].conclusion == I("a -> [0.2] c")


class TestFiles:
    def test_roundtrip(self, chain_proof):
        assert parse_rule_proof(format_rule_proof(chain_proof)) == chain_proof

    def test_all_rule_words(self):
        text = ("0: a -> [0] a ; r1\n1: a & b -> [0] a & b ; r2 0 gamma=b\n2: a -> [0.1] a ; r3 0\n"
                "3: a -> [0] 0 ; r4 2\n4: a | a -> [0] a ; r5 0 0\n5: a | a -> [0.1] a ; r5p 0 2\n"
                "6: a -> [0] a ; r6 0 0\n7: a -> [0] a ; axiom 0\n# comment\n")
        p = parse_rule_proof(text)
        assert [type(s.rule) for s in p] == [R1, R2, R3, R4, R5, R5Prime, R6, Axiom]
        assert p[1].rule.gamma == parse_formula("b")

    @pytest.mark.parametrize("text", ["0: a -> [0] a\n", "0: a -> [0] a ; r7\n", "0: a -> [0] a ; r3\n",
                                      "0: a -> [0] a ; r2 0\n", "x: a -> [0] a ; r1\n", "0: a -> a ; r1\n"])
    def test_errors(self, text):
        with pytest.raises(ParseError):
            parse_rule_proof(text)


def _random_proof(seed):
    rng = random.Random(seed)
    names = ["a", "b", "c", "d"][:rng.randint(2, 4)]
    tb = random_basic_theory(rng, names, 3)
    return tb, random_rule_proof(rng, tb, names, rng.randint(3, 12))


class TestRoundTrips:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_proof_forest_proof(self, seed):
        tb, p = _random_proof(seed)
        assert check_rule_proof(p, flatten(tb)).ok
        goal = p[-1].conclusion
        f = rule_proof_to_forest(p, tb)
        r = verify_forest(f, tb, goal)
        assert r.ok, r.violations
        q = forest_to_rule_proof(f, tb, goal)
        assert check_rule_proof(q, flatten(tb)).conclusion == goal

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_forest_proof_forest(self, seed):
        tb, zeta, eta = random_instance(random.Random(seed))
        r = entailment_degree(tb, zeta, eta)
        if not r.provable:
            return
        goal = GradedImplication(zeta, eta, r.degree)
        p = forest_to_rule_proof(r.forest, tb, goal)
        assert check_rule_proof(p, flatten(tb)).conclusion == goal
        f = rule_proof_to_forest(p, tb)
        assert verify_forest(f, tb, goal).ok

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_prime_rewriting(self, seed):
        tb, p = _random_proof(seed)
        th = flatten(tb)
        q = to_lae_prime(p)
        assert check_rule_proof(q, th, r5_prime=True).ok
        assert not any(isinstance(s.rule, (R3, R5)) for s in q)
        back = from_lae_prime(q)
        assert check_rule_proof(back, th).ok
        end, orig = back[-1].conclusion, p[-1].conclusion
        assert (end.antecedent, end.consequent) == (orig.antecedent, orig.consequent)
        assert end.degree <= orig.degree
