"""Score-derived weights and smooth weighted round-robin routing between versions."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, Optional

import numpy as np

from .model import VersionId

WEIGHT_SCALE = 100


@dataclass(frozen=True)
class WeightTable:
    weights: Mapping[VersionId, int]
    generation: int = 0

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("weight table must not be empty")
        for v, w in self.weights.items():
            if int(w) != w or w < 1:
                raise ValueError(f"weight for {v!r} must be an integer >= 1, got {w!r}")
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))

    @property
    def versions(self) -> tuple[VersionId, ...]:
        return tuple(self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())


def derive_weights(scores: Mapping[VersionId, float], generation: int = 0) -> WeightTable:
    return WeightTable(
        {v: max(1, round(WEIGHT_SCALE * s)) for v, s in scores.items()},
        generation,
    )


def reconfigure(table: WeightTable, scores: Mapping[VersionId, float]) -> WeightTable:
    return derive_weights(scores, table.generation + 1)


class Router:
    """Smooth weighted round-robin with a no-repeat guard.

    Requests are served in blocks of ``total_weight`` picks. Within a block
    each pick adds every weight to its running value and takes the largest
    (lowest index on ties), then subtracts the weight total from the winner,
    so a block hands out exactly ``weight`` picks per version. A candidate is
    skipped if it repeats the previous pick, unless its weight exceeds all
    others combined, or if taking it would leave some other version too many
    picks to place without repeats. Running values return to zero at every
    block boundary, so a block depends only on the pick before it; blocks are
    computed once per predecessor and cached.
    """

    def __init__(self, table: WeightTable):
        self.table = table
        self._reset()

    def _reset(self) -> None:
        self._blocks: dict[Optional[int], np.ndarray] = {}
        self._prev: Optional[int] = None  # pick preceding the current block
        self._pos = 0

    def _block(self, prev: Optional[int]) -> np.ndarray:
        blk = self._blocks.get(prev)
        if blk is None:
            blk = self._blocks[prev] = _build_block(list(self.table.weights.values()), prev)
        return blk

    def _advance(self, steps: int) -> None:
        blk = self._block(self._prev)
        period = len(blk)
        while steps:
            take = min(steps, period - self._pos)
            self._pos += take
            steps -= take
            if self._pos == period:
                self._prev = int(blk[-1])
                self._pos = 0
                blk = self._block(self._prev)

    def next_version(self) -> VersionId:
        i = int(self._block(self._prev)[self._pos])
        self._advance(1)
        return self.table.versions[i]

    def reconfigure(self, scores: Mapping[VersionId, float]) -> WeightTable:
        """Install weights for ``scores``, bump the generation and restart at a block boundary."""
        self.table = reconfigure(self.table, scores)
        self._reset()
        return self.table

    def cycle(self) -> np.ndarray:
        """Version indices of the first block after a reset."""
        return self._block(None)

    def route_batch(self, n: int, alive: Callable[[VersionId], bool]) -> tuple[dict[VersionId, int], int, int]:
        """Route ``n`` requests; picks of dead versions are skipped.

        Returns ``(served per version, rerouted, dropped)``. A request whose
        first pick is a version without running pods moves on to the next
        pick and counts as rerouted once. If no version is alive every
        request is dropped and the router does not advance.
        """
        versions = self.table.versions
        served = {v: 0 for v in versions}
        if n <= 0:
            return served, 0, 0
        live = np.array([bool(alive(v)) for v in versions])
        if not live.any():
            return served, 0, n

        segments = []
        need = n
        prev, pos = self._prev, self._pos
        while need:
            blk = self._block(prev)
            seg = blk[pos:]
            hits = np.flatnonzero(live[seg])
            if len(hits) >= need:
                seg = seg[: hits[need - 1] + 1]
                need = 0
            else:
                need -= len(hits)
                prev, pos = int(blk[-1]), 0
            segments.append(seg)
        picks = np.concatenate(segments)
        self._advance(len(picks))

        picked_live = live[picks]
        counts = np.bincount(picks[picked_live], minlength=len(versions))
        for i, v in enumerate(versions):
            served[v] = int(counts[i])
        # every rerouted request ends on a live pick that follows a dead one
        rerouted = int(np.count_nonzero(picked_live[1:] & ~picked_live[:-1]))
        return served, rerouted, 0


def _build_block(weights: list[int], prev: Optional[int]) -> np.ndarray:
    n = len(weights)
    total = sum(weights)
    dominant = [2 * w > total for w in weights]
    current = [0] * n
    remaining = list(weights)
    out = np.empty(total, dtype=np.int64)
    for pos in range(total):
        # after this pick, at most ceil(left / 2) copies of a version fit without repeats
        room = (total - pos) // 2
        for i in range(n):
            current[i] += weights[i]
        pick = None
        for x in sorted(range(n), key=lambda i: (-current[i], i)):
            if remaining[x] == 0 or (x == prev and not dominant[x]):
                continue
            if any(j != x and not dominant[j] and remaining[j] > room for j in range(n)):
                continue
            pick = x
            break
        if pick is None:  # pragma: no cover - a feasible pick always exists
            raise RuntimeError(f"no admissible pick for weights {weights}")
        current[pick] -= total
        remaining[pick] -= 1
        out[pos] = prev = pick
    return out
