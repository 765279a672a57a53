"""Independent reference implementations used by the tests.

Nothing here imports the code under test.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence


@lru_cache(maxsize=None)
def compositions(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """Every way to write ``total`` as ``parts`` integers >= 1 (stars and bars)."""
    out = []
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        out.append(tuple(b - a for a, b in zip(bounds, bounds[1:])))
    return tuple(out)


def brute_force_apportion(grid_scores: Sequence[int], total: int) -> tuple[int, ...]:
    """Minimum-deviation apportionment by exhaustive search, in exact integers.

    ``grid_scores`` are integer score numerators (e.g. multiples of 0.05
    scaled by 20). Over all allocations with every count >= 1 summing to
    ``total``, minimise the total absolute deviation from the exact
    proportional shares; break ties by the total squared deviation, then
    prefer larger counts for versions ranked higher by
    (share - max(1, floor(share))) descending, lower index first.
    """
    k = list(grid_scores)
    n = len(k)
    K = sum(k)
    if K == 0 or total < n:
        raise ValueError("no feasible apportionment")
    scaled_share = [total * kv for kv in k]          # share * K
    base = [max(1, s // K) for s in scaled_share]
    residual = [s - K * b for s, b in zip(scaled_share, base)]
    priority = sorted(range(n), key=lambda i: (-residual[i], i))

    best_key, best = None, None
    for c in compositions(total, n):
        dev = [K * cv - s for cv, s in zip(c, scaled_share)]
        key = (
            sum(abs(d) for d in dev),
            sum(d * d for d in dev),
            tuple(-c[i] for i in priority),
        )
        if best_key is None or key < best_key:
            best_key, best = key, c
    return best


def population_std_two_pass(xs: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    mean = math.fsum(xs) / len(xs)
    return math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / len(xs))


def smooth_wrr_reference(weights: Sequence[int], count: int) -> list[int]:
    """Textbook smooth weighted round-robin, returning picked indices."""
    current = [0] * len(weights)
    total = sum(weights)
    picks = []
    for _ in range(count):
        for i, w in enumerate(weights):
            current[i] += w
        best = max(range(len(weights)), key=lambda i: (current[i], -i))
        current[best] -= total
        picks.append(best)
    return picks


def brute_force_apportion_batch(grid_scores, total: int):
    """Vectorised :func:`brute_force_apportion` over many score vectors.

    ``grid_scores`` is an (s, n) integer array; returns an (s, n) array.
    Same objective and tie-breaking, evaluated with exact int64 arithmetic.
    """
    import numpy as np

    k = np.asarray(grid_scores, dtype=np.int64)
    s, n = k.shape
    comps = np.array(compositions(total, n), dtype=np.int64)         # (m, n)
    K = k.sum(axis=1)                                                  # (s,)
    if (K == 0).any() or total < n:
        raise ValueError("no feasible apportionment")
    share = total * k                                                  # (s, n)
    dev = K[:, None, None] * comps[None, :, :] - share[:, None, :]     # (s, m, n)
    lin = np.abs(dev).sum(axis=2)
    sq = (dev * dev).sum(axis=2)
    lin_min = lin.min(axis=1, keepdims=True)
    sq_masked = np.where(lin == lin_min, sq, np.iinfo(np.int64).max)
    sq_min = sq_masked.min(axis=1, keepdims=True)
    cand = (lin == lin_min) & (sq_masked == sq_min)
    out = comps[cand.argmax(axis=1)].copy()
    multi = np.flatnonzero(cand.sum(axis=1) > 1)
    for row in multi:
        base = np.maximum(1, share[row] // K[row])
        residual = share[row] - K[row] * base
        priority = sorted(range(n), key=lambda i: (-residual[i], i))
        options = comps[cand[row]]
        best = min(options.tolist(), key=lambda c: tuple(-c[i] for i in priority))
        out[row] = best
    return out
