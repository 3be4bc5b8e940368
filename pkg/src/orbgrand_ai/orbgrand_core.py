"""Reliability rank-ordering and ORBGRAND pattern enumeration.

A pattern is a set of distinct 1-based ranks; its logistic weight is the sum
of the ranks. Patterns are emitted in nondecreasing weight; within a weight,
fewer elements first, then lexicographically smallest rank set first. Each
(weight, cardinality) cell is walked as the integer partitions of the weight
into that many distinct parts no larger than ``mu``, so the state is one
``O(mu)`` array and nothing is materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np


@dataclass(frozen=True, eq=False)
class RankPermutation:
    """``order[r - 1]`` is the candidate holding rank ``r``; ``weights`` are
    the candidate weights in rank order."""

    order: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.order)


def rank_sort(weights) -> RankPermutation:
    """Stable ascending sort of reliability weights (least reliable first).
    Ties go to the lower candidate index."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise ValueError("weights must be 1-D")
    if np.isnan(w).any():
        raise ValueError("NaN reliability weight")
    if np.isinf(w).any() or (w < 0).any():
        raise ValueError("weights must be finite and nonnegative")
    order = np.argsort(w, kind="stable")
    return RankPermutation(order, w[order])


@dataclass(frozen=True)
class Pattern:
    ranks: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.ranks)

    def __len__(self):
        return len(self.ranks)


@numba.njit(cache=True)
def _fill(parts, start, lo, remaining, c, mu):
    # Lex-smallest strictly increasing parts[start:c] with parts[start] >= lo,
    # all <= mu, summing to `remaining`. Distinct-part sums over a range are
    # contiguous, so feasibility is a pair of bounds.
    for j in range(start, c):
        r = c - 1 - j
        max_rest = r * mu - r * (r - 1) // 2
        v = max(lo, remaining - max_rest)
        if v > mu - r or v * (r + 1) + r * (r + 1) // 2 > remaining:
            return False
        parts[j] = v
        remaining -= v
        lo = v + 1
    return remaining == 0


@numba.njit(cache=True)
def advance(parts, state, mu, max_weight):
    """Step to the next pattern in place.

    ``state = [weight, cardinality]`` and ``parts[:cardinality]`` hold the
    current pattern; ``state = [0, 0]`` is the empty pattern. Returns False
    once every pattern of weight <= ``max_weight`` has been produced.
    """
    w = state[0]
    c = state[1]
    if c >= 2:
        prefix = 0
        for j in range(c - 1):
            prefix += parts[j]
        for j in range(c - 2, -1, -1):
            prefix -= parts[j]
            if _fill(parts, j, parts[j] + 1, w - prefix, c, mu):
                return True
    # next (weight, cardinality) cell
    while True:
        c += 1
        if c > mu or c * (c + 1) // 2 > w:
            w += 1
            c = 1
            if w > max_weight:
                state[0] = w
                state[1] = 0
                return False
        if _fill(parts, 0, 1, w, c, mu):
            state[0] = w
            state[1] = c
            return True


class PatternEnumerator:
    """Iterator over ORBGRAND patterns for ``mu`` ranks; the first pattern is
    the empty one."""

    def __init__(self, mu: int, max_weight: int | None = None):
        if mu < 0:
            raise ValueError("mu must be nonnegative")
        full = mu * (mu + 1) // 2
        self.mu = int(mu)
        self.max_weight = full if max_weight is None else min(int(max_weight), full)
        self.emitted = 0
        self._parts = np.zeros(max(mu, 1), dtype=np.int64)
        self._state = np.zeros(2, dtype=np.int64)
        self._done = False

    def __iter__(self):
        return self

    def __next__(self) -> Pattern:
        if self._done:
            raise StopIteration
        if self.emitted and not advance(self._parts, self._state, self.mu, self.max_weight):
            self._done = True
            raise StopIteration
        self.emitted += 1
        return Pattern(tuple(int(p) for p in self._parts[: self._state[1]]))


def next_pattern(enumerator: PatternEnumerator) -> Pattern | None:
    """Next pattern, or None once exhausted."""
    return next(enumerator, None)
