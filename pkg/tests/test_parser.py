from fractions import Fraction

import pytest
from hypothesis import given

from laeq.parser import ParseError, format_theory, parse_formula, parse_implication, parse_query, parse_theory
from laeq.syntax import BOTTOM, TOP, And, GradedImplication, Not, Or, Var, format_formula

from strategies import formulas


class TestFormulaGrammar:
    def test_conjunction_with_negation(self):
        assert parse_formula("a & ~b") == And(Var("a"), Not(Var("b")))

    def test_constants(self):
        assert parse_formula("0") == BOTTOM
        assert parse_formula("1") == TOP

    def test_and_binds_tighter_than_or(self):
        assert parse_formula("a | b & c") == Or(Var("a"), And(Var("b"), Var("c")))

    def test_negation_binds_tightest(self):
        assert parse_formula("~a & b") == And(Not(Var("a")), Var("b"))

    def test_left_associative(self):
        assert parse_formula("a | b | c") == Or(Or(Var("a"), Var("b")), Var("c"))

    def test_parentheses(self):
        assert parse_formula("(a | b) & c") == And(Or(Var("a"), Var("b")), Var("c"))

    def test_identifiers(self):
        assert parse_formula("_x1 & Foo") == And(Var("_x1"), Var("Foo"))

    @given(formulas())
    def test_format_roundtrip(self, f):
        assert parse_formula(format_formula(f)) == f


class TestErrors:
    @pytest.mark.parametrize("text", ["", "a &", "(a | b", "a b", "a | | b", "~", "a)", "2"])
    def test_malformed_formula(self, text):
        with pytest.raises(ParseError):
            parse_formula(text)

    def test_position_is_reported(self):
        with pytest.raises(ParseError) as info:
            parse_formula("a & & b")
        assert info.value.line == 1
        assert info.value.column == 5

    def test_theory_error_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_theory("a -> [0] b\n\nb -> [x] c\n")
        assert info.value.line == 3

    @pytest.mark.parametrize("text", ["a -> b", "a -> [0.3 b", "a -> [-1] b", "a [0] b", "a -> [0] b c"])
    def test_malformed_implication(self, text):
        with pytest.raises(ParseError):
            parse_implication(text)


class TestImplications:
    def test_decimal_degree(self):
        imp = parse_implication("a & b -> [0.3] d | e")
        assert imp == GradedImplication(And(Var("a"), Var("b")), Or(Var("d"), Var("e")), Fraction(3, 10))

    def test_zero_degree(self):
        assert parse_implication("x -> [0] y").degree == 0

    def test_fraction_degree(self):
        assert parse_implication("a -> [1/3] b").degree == Fraction(1, 3)

    def test_str_roundtrip(self):
        imp = parse_implication("~(a | b) -> [1/3] c & ~d")
        assert parse_implication(str(imp)) == imp

    def test_query(self):
        q = parse_query("a -> [?] b")
        assert q.degree is None
        assert parse_query("a -> [0.5] b").degree == Fraction(1, 2)
        with pytest.raises(ParseError):
            parse_implication("a -> [?] b")


class TestTheoryFiles:
    def test_comments_and_blank_lines(self):
        theory = parse_theory("# header\n\na -> [0] b  # trailing\n   \nb -> [0.2] c\n")
        assert [str(t) for t in theory] == ["a -> [0] b", "b -> [0.2] c"]

    def test_format_roundtrip(self, example_theory):
        assert parse_theory(format_theory(example_theory)) == example_theory
