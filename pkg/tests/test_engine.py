import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laeq.degrees import subset_sums
from laeq.engine import DegreeResult, brute_force_degree, cost_table, entailment_degree, prove
from laeq.forest import ProofForest, verify_forest
from laeq.generate import random_instance
from laeq.parser import parse_formula as F
from laeq.parser import parse_implication, parse_theory
from laeq.semantics import SearchBudgetExceeded
from laeq.syntax import GradedImplication, Literal, clause, to_basic_theory


def basic_theory(text):
    return to_basic_theory(parse_theory(text))


class TestWorkedExample:
    def test_minimal_degree(self, example_basic, example_goal):
        r = prove(example_basic, example_goal)
        assert r.provable
        assert r.degree == Fraction(3, 10)
        assert verify_forest(r.forest, example_basic, example_goal).ok

    def test_oracle_agrees(self, example_basic, example_goal):
        o = brute_force_degree(example_basic, example_goal.antecedent, example_goal.consequent, 12)
        assert o.degree == Fraction(3, 10)
        assert verify_forest(o.forest, example_basic, example_goal).ok


class TestSmallCases:
    def test_tautology_needs_no_theory(self):
        r = entailment_degree([], F("a"), F("a"))
        assert r.degree == 0
        assert len(r.forest) == 1
        assert r.forest[0].label == clause("a")

    def test_chain_sums(self):
        tb = basic_theory("a -> [1/10] b\nb -> [1/5] c\n")
        r = entailment_degree(tb, F("a"), F("c"))
        assert r.degree == Fraction(3, 10)
        assert brute_force_degree(tb, F("a"), F("c"), 8).degree == Fraction(3, 10)

    def test_unrelated_variables(self):
        r = entailment_degree([], F("a"), F("b"))
        assert not r.provable
        assert r.degree is None and r.forest is None
        assert not brute_force_degree([], F("a"), F("b"), 6).provable

    def test_inconsistent_antecedent(self):
        r = entailment_degree([], F("a & ~a"), F("b"))
        assert r.degree == 0
        assert r.forest == ProofForest(())
        assert brute_force_degree([], F("0"), F("b"), 3).degree == 0

    def test_contradiction_is_free_of_cost(self):
        tb = basic_theory("a -> [0.7] 0\n")
        r = entailment_degree(tb, F("a"), F("b"))
        assert r.degree == 0

    def test_shorter_route_wins(self):
        tb = basic_theory("a -> [0.5] c\na -> [0.1] b\nb -> [0.1] c\n")
        assert entailment_degree(tb, F("a"), F("c")).degree == Fraction(1, 5)

    def test_case_split_takes_the_worse_branch(self):
        tb = basic_theory("a & b -> [0.1] c\na & ~b -> [0.3] c\n")
        r = entailment_degree(tb, F("a"), F("c"))
        assert r.degree == Fraction(3, 10)
        assert any(type(j).__name__ == "CaseD" for j in r.forest.justifications())

    def test_disjunctive_antecedent(self):
        tb = basic_theory("a -> [0.1] c\nb -> [0.2] c\n")
        assert entailment_degree(tb, F("a | b"), F("c")).degree == Fraction(1, 5)

    def test_degree_result_consistency(self):
        with pytest.raises(ValueError):
            DegreeResult(True, None, None)
        with pytest.raises(ValueError):
            DegreeResult(False, Fraction(0), None)

    def test_budget(self, example_basic, example_goal):
        with pytest.raises(SearchBudgetExceeded):
            prove(example_basic, example_goal, budget=10)


class TestCostTable:
    def test_monotone_in_the_clause(self, example_basic, example_goal):
        table = cost_table(example_basic, example_goal.antecedent, example_goal.consequent)
        rng = random.Random(0)

        def some_clause():
            return frozenset(Literal(n, rng.random() < 0.5) for n in table.names if rng.random() < 0.4)

        for _ in range(300):
            small = some_clause()
            big = small | {lit for lit in some_clause() if lit.negate() not in small}
            assert table.cost(big) <= table.cost(small)


def _instances(n, seed):
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(n)]


class TestAgainstOracle:
    @pytest.mark.parametrize("tb,zeta,eta", _instances(60, 1))
    def test_agreement(self, tb, zeta, eta):
        r = entailment_degree(tb, zeta, eta)
        o = brute_force_degree(tb, zeta, eta, 10)
        if o.provable:
            assert r.provable and r.degree == o.degree
        elif r.provable:
            # the engine's witness may exceed the node bound
            assert len(r.forest) > 10 or brute_force_degree(tb, zeta, eta, 16).degree == r.degree
        if r.provable:
            goal = GradedImplication(zeta, eta, r.degree)
            assert verify_forest(r.forest, tb, goal).ok
            assert r.degree in subset_sums([b.degree for b in tb])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_witness_always_verifies(seed):
    tb, zeta, eta = random_instance(random.Random(seed), ("a", "b", "c", "d"), 4)
    r = entailment_degree(tb, zeta, eta)
    if r.provable:
        assert verify_forest(r.forest, tb, GradedImplication(zeta, eta, r.degree)).ok
        if r.degree > 0:
            # nothing shorter verifies
            below = max(d for d in subset_sums([b.degree for b in tb]) if d < r.degree)
            assert not verify_forest(r.forest, tb, GradedImplication(zeta, eta, below)).ok


def test_goal_helper_matches():
    tb = basic_theory("a -> [0.2] b\n")
    assert prove(tb, parse_implication("a -> [0] b")).degree == Fraction(1, 5)
