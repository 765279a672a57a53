"""
Replica apportionment and the diversity factor
==============================================

Scores become replica counts; every version keeps at least one replica.
"""

import numpy as np

from divscale import adjust_replica_distribution, diversity_factor

cases = [
    ({"a": 1.0, "b": 1.0, "c": 1.0}, 15),
    ({"a": 0.2, "b": 0.4, "c": 0.4}, 15),
    ({"a": 0.9, "b": 0.05, "c": 0.05}, 3),
    ({"a": 0.5, "b": 0.3, "c": 0.2}, 10),
]
for scores, total in cases:
    plan = adjust_replica_distribution(scores, total)
    print(f"{list(scores.values())} x {total:2d} -> {plan.as_tuple()}  DF={diversity_factor(plan)}")

###############################################################################
# Sweep the score of one version and watch its share shrink. The floor of
# one replica holds even when the score reaches zero.

for s in np.linspace(1.0, 0.0, 6):
    plan = adjust_replica_distribution({"faulty": s, "b": 1.0, "c": 1.0}, 15)
    print(f"faulty score {s:.1f}: {plan.as_tuple()}")
