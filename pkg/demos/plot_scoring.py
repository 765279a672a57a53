"""
Scoring versions from their metric windows
==========================================

Three versions, one two-minute window each. Lower spread and fewer
restarts mean a higher score.
"""

from divscale import MetricSample, MetricWindow, ReliabilityWeights, aggregate_window, score_all

# build one window per version from per-second samples
def samples(rt, mem, restarts=()):
    return [MetricSample(t, rt(t), mem(t), t in restarts) for t in range(120)]

raw = {
    "steady": samples(lambda t: 50.0, lambda t: 64.0),
    "flaky": samples(lambda t: 50.0, lambda t: 64.0, restarts={30, 90}),
    "slow": samples(lambda t: 50.0 + (2000.0 if t % 240 < 120 and t > 60 else 0.0), lambda t: 64.0),
}
windows = [aggregate_window(s, 0, 120, v) for v, s in raw.items()]
for w in windows:
    print(f"{w.version:7s} restarts={w.restart_count} rt_sd={w.response_time_stddev_ms:8.2f} "
          f"mem_sd={w.memory_stddev_mb:.2f}")

###############################################################################
# Default weights put half of the score on restarts.

scores = score_all(windows, ReliabilityWeights())
print({v: round(s, 3) for v, s in scores.items()})

###############################################################################
# Doubling every response time changes nothing: utilities are min-max scaled.

doubled = [
    MetricWindow(w.version, 0, 120, w.restart_count, 2 * w.response_time_stddev_ms, w.memory_stddev_mb)
    for w in windows
]
print(score_all(doubled, ReliabilityWeights()) == scores)
