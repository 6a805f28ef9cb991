"""Compare the value-iteration engine with the exhaustive oracle on random instances.

Prints a histogram of minimal degrees and the time each method took.
Usage: ``python3 demos/oracle_sweep.py [N] [SEED]``.
"""

import random
import sys
import time
from collections import Counter

from laeq import brute_force_degree, entailment_degree
from laeq.generate import random_instance

n = int(sys.argv[1]) if len(sys.argv) > 1 else 200
rng = random.Random(int(sys.argv[2]) if len(sys.argv) > 2 else 0)
instances = [random_instance(rng) for _ in range(n)]

t0 = time.perf_counter()
engine = [entailment_degree(*inst) for inst in instances]
t1 = time.perf_counter()
oracle = [brute_force_degree(*inst, 10) for inst in instances]
t2 = time.perf_counter()

hist = Counter(str(r.degree) if r.provable else "not provable" for r in engine)
for key, count in sorted(hist.items()):
    print(f"{key:>14}  {'#' * (count * 60 // n)} {count}")

disagree = sum(r.provable != o.provable or (o.provable and r.degree != o.degree) for r, o in zip(engine, oracle))
print(f"\nengine {t1 - t0:.2f}s, oracle {t2 - t1:.2f}s, {disagree} disagreements out of {n}")
