"""Reliability-proportional replica apportionment with a one-replica floor.

Shares are ``total * score / sum(scores)``. Each version first gets
``max(1, floor(share))``. The leftover (or overshoot, caused by the floor)
is repaired in priority order: versions are ranked by the residual
``share - count`` descending, ties by ascending index. Missing replicas go to
the front of that ranking; surplus replicas are taken from the back, one per
version per pass, never below one, cycling until the budget is met.

Ranking by the residual left *after* the floor is applied (rather than the
raw fractional part) keeps a floored version from also winning a deficit
increment, which is what makes the result a minimum-deviation apportionment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .model import DivscaleError, ReplicaPlan, VersionId

# shares equal up to this many decimals are treated as ties
_TIE_DECIMALS = 9
_FLOOR_EPS = 1e-9


class InfeasibleBudget(DivscaleError):
    pass


class AllScoresZero(DivscaleError):
    pass


def apportion(scores: Sequence[float], total: int) -> list[int]:
    """Index-based core of :func:`adjust_replica_distribution`."""
    n = len(scores)
    if n == 0:
        raise ValueError("need at least one version")
    if total < n:
        raise InfeasibleBudget(f"total {total} < {n} versions")
    if any(not math.isfinite(s) or s < 0 for s in scores):
        raise ValueError(f"scores must be finite and >= 0: {list(scores)}")
    score_sum = math.fsum(scores)
    if score_sum <= 0:
        raise AllScoresZero("cannot apportion when every score is zero")

    shares = [total * s / score_sum for s in scores]
    counts = [max(1, math.floor(p + _FLOOR_EPS)) for p in shares]
    residual = [round(p - c, _TIE_DECIMALS) for p, c in zip(shares, counts)]
    order = sorted(range(n), key=lambda i: (-residual[i], i))

    diff = sum(counts) - total
    if diff < 0:
        # deficit < number of unfloored versions, so one pass suffices
        for k in range(-diff):
            counts[order[k % n]] += 1
    while diff > 0:
        progressed = False
        for i in reversed(order):
            if diff == 0:
                break
            if counts[i] > 1:
                counts[i] -= 1
                diff -= 1
                progressed = True
        if not progressed:  # pragma: no cover - unreachable when total >= n
            raise InfeasibleBudget(f"cannot reach total {total} with a floor of 1")
    return counts


def adjust_replica_distribution(scores: Mapping[VersionId, float], total: int) -> ReplicaPlan:
    """Split ``total`` replicas across versions in proportion to their scores."""
    versions = list(scores)
    counts = apportion([scores[v] for v in versions], total)
    return ReplicaPlan(dict(zip(versions, counts)))


class _Uniform:
    """Diversity factor of a perfectly even distribution (zero spread)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Uniform"

    def __str__(self) -> str:
        return "uniform"

    def __reduce__(self):
        return (_Uniform, ())


UNIFORM = _Uniform()


@dataclass(frozen=True)
class DiversityFactor:
    value: Union[float, _Uniform]

    @property
    def is_uniform(self) -> bool:
        return self.value is UNIFORM

    def __str__(self) -> str:
        return "uniform" if self.is_uniform else repr(float(self.value))


def replica_spread(counts: Sequence[int]) -> float:
    """Population standard deviation of replica counts."""
    if not counts:
        raise ValueError("empty distribution")
    mean = sum(counts) / len(counts)
    return math.sqrt(sum((c - mean) ** 2 for c in counts) / len(counts))


def diversity_factor(plan: Union[ReplicaPlan, Sequence[int]]) -> DiversityFactor:
    counts = plan.as_tuple() if isinstance(plan, ReplicaPlan) else tuple(plan)
    if len(set(counts)) == 1:
        return DiversityFactor(UNIFORM)
    return DiversityFactor(1.0 / replica_spread(counts))
