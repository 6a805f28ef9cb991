"""Apply the normalization passes one at a time to an engine forest and watch it shrink."""

from laeq import apply_pass, entailment_degree, parse_formula, parse_theory, render_forest, to_basic_theory
from laeq import verify_forest
from laeq.generate import with_fresh_split
from laeq.normalize import PASSES
from laeq.syntax import GradedImplication, neg, pos

tb = to_basic_theory(parse_theory("a & b -> [0.1] c\na & ~b -> [0.2] c | d\nd -> [0] c\n"))
zeta, eta = parse_formula("a & e"), parse_formula("c")
res = entailment_degree(tb, zeta, eta)
goal = GradedImplication(zeta, eta, res.degree)

# z occurs nowhere in the problem, so both of its polarities can be purged
forest = with_fresh_split(res.forest, "z")
print(f"goal {goal}; start with {len(forest)} nodes")
print(render_forest(forest))

for step in [*PASSES, pos("z"), neg("z")]:
    forest = apply_pass(forest, tb, goal, step)
    r = verify_forest(forest, tb, goal)
    name = step if isinstance(step, str) else f"purge-polarity({step})"
    print(f"{name:>20}: {len(forest):2} nodes, length {r.length}, verifies {r.ok}")

print()
print(render_forest(forest))
