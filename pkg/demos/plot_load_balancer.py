"""
Weighted round-robin between versions
=====================================

Weights are scores times 100. Picks interleave, and no version is picked
twice in a row unless it holds more than half the total weight.
"""

from divscale import Router, WeightTable, derive_weights

router = Router(WeightTable({"A": 2, "B": 1, "C": 1}))
print("".join(router.next_version() for _ in range(12)))

###############################################################################
# Scores from an action tick become the next weight table.

router = Router(derive_weights({"faulty": 0.5, "inconsistent": 0.8, "leak": 0.7}))
print(dict(router.table.weights), "generation", router.table.generation)
table = router.reconfigure({"faulty": 1.0, "inconsistent": 1.0, "leak": 1.0})
print(dict(table.weights), "generation", table.generation)

###############################################################################
# A whole block of requests, with one version down: its share is rerouted.

router = Router(derive_weights({"faulty": 0.5, "inconsistent": 0.8, "leak": 0.7}))
served, rerouted, dropped = router.route_batch(200, lambda v: v != "faulty")
print(served, "rerouted", rerouted, "dropped", dropped)
