"""Recursive-descent parser for formulas, graded implications and theory files.

Grammar::

    formula := disj
    disj    := conj ('|' conj)*
    conj    := neg ('&' neg)*
    neg     := '~' neg | atom
    atom    := IDENT | '0' | '1' | '(' formula ')'
    implication := formula '->' '[' DEGREE ']' formula

``0`` is ⊥ and ``1`` is ⊤.  Binary connectives associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .degrees import DegreeError, parse_degree
from .syntax import BOTTOM, TOP, And, Formula, GradedImplication, Not, Or, Var


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SIMPLE = {"~": "NOT", "&": "AND", "|": "OR", "(": "LPAR", ")": "RPAR", "0": "BOT", "1": "TOP"}


def _tokenize(text: str, line: int = 1, column: int = 1) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            column += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(), line, column))
            column += m.end() - i
            i = m.end()
            continue
        if text.startswith("->", i):
            tokens.append(_Token("ARROW", "->", line, column))
            i += 2
            column += 2
            continue
        if ch == "[":
            end = text.find("]", i)
            if end < 0:
                raise ParseError("unterminated degree, expected ']'", line, column)
            tokens.append(_Token("DEGREE", text[i + 1:end], line, column))
            column += end + 1 - i
            i = end + 1
            continue
        if ch in _SIMPLE:
            # a digit run such as "10" is not a constant
            if ch in "01" and i + 1 < len(text) and text[i + 1].isdigit():
                raise ParseError(f"unexpected number {text[i:i + 2]!r}", line, column)
            tokens.append(_Token(_SIMPLE[ch], ch, line, column))
            i += 1
            column += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, column)
    tokens.append(_Token("EOF", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.line, t.column)

    def formula(self) -> Formula:
        f = self.conj()
        while self.tok.kind == "OR":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.neg()
        while self.tok.kind == "AND":
            self.advance()
            f = And(f, self.neg())
        return f

    def neg(self) -> Formula:
        if self.tok.kind == "NOT":
            self.advance()
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "IDENT":
            self.advance()
            return Var(t.text)
        if t.kind == "BOT":
            self.advance()
            return BOTTOM
        if t.kind == "TOP":
            self.advance()
            return TOP
        if t.kind == "LPAR":
            self.advance()
            f = self.formula()
            self.expect("RPAR", "')'")
            return f
        self.fail("expected a variable, constant or '('")


def parse_formula(text: str) -> Formula:
    p = _Parser(_tokenize(text))
    f = p.formula()
    if p.tok.kind != "EOF":
        p.fail("expected end of formula")
    return f


def _parse_implication(text: str, line: int, allow_query: bool):
    p = _Parser(_tokenize(text, line))
    ant = p.formula()
    p.expect("ARROW", "'->'")
    deg_tok = p.expect("DEGREE", "'[degree]'")
    cons = p.formula()
    if p.tok.kind != "EOF":
        p.fail("expected end of implication")
    raw = deg_tok.text.strip()
    if allow_query and raw == "?":
        return ant, cons, None
    try:
        degree = parse_degree(raw)
    except DegreeError as exc:
        raise ParseError(str(exc), deg_tok.line, deg_tok.column) from None
    return ant, cons, degree


def parse_implication(text: str) -> GradedImplication:
    """Parse ``FORMULA -> [DEGREE] FORMULA``; decimals and fractions are exact."""
    ant, cons, degree = _parse_implication(text, 1, False)
    return GradedImplication(ant, cons, degree)


@dataclass(frozen=True)
class Query:
    """A goal whose degree may be left open (``[?]``)."""

    antecedent: Formula
    consequent: Formula
    degree: Optional[object]


def parse_query(text: str) -> Query:
    return Query(*_parse_implication(text, 1, True))


def strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_theory(text: str) -> list[GradedImplication]:
    """One implication per line; ``#`` comments and blank lines are ignored."""
    theory = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = strip_comment(raw)
        if not body.strip():
            continue
        ant, cons, degree = _parse_implication(body, lineno, False)
        theory.append(GradedImplication(ant, cons, degree))
    return theory


def format_theory(theory) -> str:
    return "".join(f"{imp}\n" for imp in theory)
