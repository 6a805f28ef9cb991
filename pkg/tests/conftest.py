from fractions import Fraction

import pytest

from laeq import parse_implication, parse_theory, to_basic_theory

EXAMPLE_THEORY = """\
# worked example: alpha=a, beta=b, gamma=c, delta=d, epsilon=e
a -> [0] ~b | c
b & c -> [0.3] d | e
d -> [0] ~e
"""
EXAMPLE_GOAL = "a & b -> [0.3] (~d & e) | (d & ~e)"


@pytest.fixture
def example_theory():
    return parse_theory(EXAMPLE_THEORY)


@pytest.fixture
def example_basic(example_theory):
    return to_basic_theory(example_theory)


@pytest.fixture
def example_goal():
    return parse_implication(EXAMPLE_GOAL)


@pytest.fixture
def tenth():
    return Fraction(1, 10)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion; the lines are repeated in the summary."""

    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
