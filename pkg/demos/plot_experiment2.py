"""
Stepped load with autoscaling
=============================

Nine replicas to start, CPU thresholds 20% and 60%, bounds 3 and 24. All
three chaos types run throughout, so the split stays uneven while the
total follows the load.
"""

from divscale import bundled_scenario_path, load_scenario, simulate

scenario = load_scenario(bundled_scenario_path("experiment2"))
result = simulate(scenario)
per = scenario.config.ticks_per_action

for k, act in enumerate(result.actions):
    cpus = [m.cpu_pct for m in result.monitors[k * per:(k + 1) * per]]
    mean = sum(c for c in cpus if c is not None) / max(1, sum(c is not None for c in cpus))
    bar = "#" * act.total_replicas
    print(f"{act.time_s / 60:5.0f} min  cpu={mean:5.1f}%  {act.decision!s:8s} {act.total_replicas:2d} {bar}")
