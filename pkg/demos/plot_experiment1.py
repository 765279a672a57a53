"""
Constant load, phased chaos
===========================

Fifteen replicas over three frontend versions with scaling off. Chaos hits
one version at a time, then all three. The plan moves away from (5, 5, 5)
while a version misbehaves and returns once its faults age out of the
fifteen-minute scoring look-back.
"""

from divscale import bundled_scenario_path, load_scenario, simulate

scenario = load_scenario(bundled_scenario_path("experiment1"))
result = simulate(scenario)

last = None
for act in result.actions:
    plan = act.plan.as_tuple()
    if plan != last:
        scores = ", ".join(f"{s:.2f}" for s in act.scores.values())
        print(f"{act.time_s / 60:6.0f} min  plan={plan}  scores=[{scores}]  DF={act.diversity}")
        last = plan

###############################################################################
# Requests that hit a killed version were sent on to the next pick.

print(f"generated={result.generated} served={result.served} rerouted={result.rerouted} dropped={result.dropped}")
