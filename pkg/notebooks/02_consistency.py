"""Estimators converge to the product integral of the observed hazards.

That limit equals the truth only when identity of forces holds. In the
dependent counterexample, early censoring removes exactly the subjects who
would have had late events.
"""

import numpy as np

from censprop.bench import ExampleSpec, build_example_world, consistency_experiment, dependent_counterexample
from censprop.model import derive

square = build_example_world(ExampleSpec(8))
rows = consistency_experiment(square, [100, 1000, 10_000], range(10), "T1C1")
for n in (100, 1000, 10_000):
    print(f"T1C1 n={n:>6}: median sup|S_hat - S| = {np.median([r.sup_error_S for r in rows if r.n == n]):.4f}")

dep = dependent_counterexample()
f = derive(dep)
print("true S:", f.S, " limit S:", np.cumprod(1 - f.dHt_all))
for r in consistency_experiment(dep, [100, 1000, 10_000], [0], "dep"):
    print(f"dep n={r.n:>6}: distance to limit {r.sup_error_P:.4f}, to truth {r.sup_gap_truth_P:.4f}")
