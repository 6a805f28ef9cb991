"""Walk through the worked example from proof search to countermodel.

Theory over a, b, c, d, e:

    a -> [0] ~b | c
    b & c -> [0.3] d | e
    d -> [0] ~e

Goal: a & b -> (~d & e) | (d & ~e).  Run with ``python3 demos/worked_example.py``.
"""

from fractions import Fraction

from laeq import (check_rule_proof, entailment_degree, find_countermodel, forest_to_rule_proof, format_rule_proof,
                  parse_formula, parse_theory, render_forest, satisfies, to_basic_theory, verify_forest)
from laeq.semantics import format_space
from laeq.syntax import GradedImplication, flatten

theory = parse_theory("a -> [0] ~b | c\nb & c -> [0.3] d | e\nd -> [0] ~e\n")
tb = to_basic_theory(theory)
zeta = parse_formula("a & b")
eta = parse_formula("(~d & e) | (d & ~e)")

print("basic theory:")
for k, bi in enumerate(tb):
    print(f"  {k}: {bi}")

res = entailment_degree(tb, zeta, eta)
goal = GradedImplication(zeta, eta, res.degree)
print(f"\nminimal degree: {res.degree}")
print("\nwitness forest (justifications in brackets):")
print(render_forest(res.forest))
report = verify_forest(res.forest, tb, goal)
print(f"verifies: {report.ok}, length {report.length}")

proof = forest_to_rule_proof(res.forest, tb, goal)
print(f"\nthe same derivation as a rule proof ({len(proof)} steps):")
print(format_rule_proof(proof), end="")
print(f"checker: {check_rule_proof(proof, flatten(tb)).ok}")

# just below the minimum a finite countermodel exists
weaker = goal.with_degree(Fraction(1, 5))
m = find_countermodel(theory, weaker)
print(f"\ncountermodel for {weaker}:")
print(format_space(m), end="")
print(f"theory holds: {all(satisfies(m, t) for t in theory)}, goal holds: {satisfies(m, weaker)}")
