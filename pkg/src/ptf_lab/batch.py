"""Randomized batch learner with the restricted monotone inference rule.

Each outer iteration repeatedly samples a batch of m points (with
replacement), queries their full sign patterns in one round, and stops once
the batch's patterns cover enough of the still-unknown points.  A point is
inferred exactly when it is sandwiched between two adjacent queried points
with identical full sign patterns: such a stretch is monotone with equal
endpoint labels, so the inferred label is always correct.  Once few enough
points remain they are queried exhaustively in a single final round.

The restricted rule needs the sign of every order 0..d-1 at both sandwich
endpoints; no inference is attempted from partial patterns.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instances import Instance
from .oracle import Oracle

# expected while-loop length per iteration is at most 2 batches
_LOOP_GUARD_FACTOR = 64


class NonTermination(RuntimeError):
    """A coverage loop ran far past its expected length; parameter or soundness bug."""


@dataclass(frozen=True)
class BatchParams:
    """Batch size and iteration cutoff derived from (d, n, alpha).

    k = d^2 + d + 3 points always contain three consecutive ones with equal
    sign patterns, so k bounds how many points per batch can stay
    uninferable; m = ceil(2k n^alpha) and t = ceil(log n / log(m / 2k)).
    """

    d: int
    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (1.0 / math.log(self.n) < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (1/log n, 1]")

    @property
    def k(self) -> int:
        return self.d * self.d + self.d + 3

    @property
    def m(self) -> int:
        return math.ceil(2 * self.k * self.n**self.alpha)

    @property
    def t(self) -> int:
        ratio = self.m / (2 * self.k)
        if ratio <= 1:
            raise ValueError("batch size must exceed 2k")
        return math.ceil(math.log(self.n) / math.log(ratio))

    @property
    def coverage_threshold(self) -> float:
        return (self.m - 2 * self.k) / self.m


def restricted_infer(
    queried: Sequence[tuple], targets: Sequence
) -> list[tuple[int, int]]:
    """Labels inferable from sandwiching queried points with equal patterns.

    ``queried`` holds (x, pattern) pairs sorted by x; ``targets`` is sorted.
    A target strictly between two adjacent queried points whose patterns are
    identical gets their shared label (pattern entry 0).  Returns
    (target_index, sign) pairs for the inferable targets only.
    """
    if len(queried) < 2:
        return []
    xs = [x for x, _ in queried]
    patterns = [tuple(p) for _, p in queried]
    pair_equal = [patterns[i] == patterns[i + 1] for i in range(len(patterns) - 1)]
    out = []
    for idx, t in enumerate(targets):
        pos = bisect.bisect_left(xs, t)
        if 0 < pos < len(xs) and xs[pos] != t and pair_equal[pos - 1]:
            out.append((idx, patterns[pos - 1][0]))
    return out


def coverage(queried: Sequence[tuple], remaining: Sequence) -> float:
    """Fraction of the remaining (unqueried) points inferable from queried patterns."""
    if len(remaining) == 0:
        return 1.0
    return len(restricted_infer(queried, remaining)) / len(remaining)


def _infer_indices(
    queried_idx: np.ndarray, patterns: np.ndarray, target_idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized restricted_infer on point indices.

    queried_idx: sorted int array; patterns: int8 array (len(queried), d);
    target_idx: sorted int array disjoint from queried_idx.  Returns
    (positions into target_idx, inferred signs).
    """
    if len(queried_idx) < 2 or len(target_idx) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int8)
    pair_equal = np.all(patterns[1:] == patterns[:-1], axis=1)
    pos = np.searchsorted(queried_idx, target_idx)
    ok = (pos > 0) & (pos < len(queried_idx))
    ok[ok] &= pair_equal[pos[ok] - 1]
    positions = np.flatnonzero(ok)
    signs = patterns[pos[positions] - 1, 0]
    return positions, signs


@dataclass
class BatchResult:
    labels: np.ndarray
    iterations: int  # outer iterations that ran a coverage loop
    loop_rounds: int  # total while-loop bodies (= pattern batches sent)
    final_round: bool  # whether the exhaustive final batch was sent


def _query_patterns(instance: Instance, oracle: Oracle, idx: np.ndarray) -> np.ndarray:
    """Full patterns for the given point indices, sent as one batch round."""
    d = instance.d
    pts = instance.points
    requests = [(pts[i], order) for order in range(d) for i in idx]
    answers = oracle.query_batch(requests)
    return np.array(answers, dtype=np.int8).reshape(d, len(idx)).T


def learn_all(
    instance: Instance, oracle: Oracle, params: BatchParams, rng: np.random.Generator
) -> BatchResult:
    """Label every point using batched pattern queries plus restricted inference."""
    d, n = instance.d, instance.n
    if not oracle.qset.is_full() or oracle.d != d:
        raise ValueError("batch learner needs orders 0..d-1")
    if params.d != d or params.n != n:
        raise ValueError("params do not match the instance")
    m, t, threshold = params.m, params.t, params.coverage_threshold
    guard = _LOOP_GUARD_FACTOR * 2

    labels = np.zeros(n, dtype=np.int8)
    remaining = np.arange(n)
    iterations = 0
    loop_rounds = 0
    final_round = False

    for _ in range(t):
        if len(remaining) <= m:
            break
        iterations += 1
        bodies = 0
        while True:
            bodies += 1
            if bodies > guard:
                raise NonTermination(f"coverage loop exceeded {guard} batches")
            sampled = np.unique(rng.integers(0, len(remaining), size=m))
            queried_idx = remaining[sampled]
            patterns = _query_patterns(instance, oracle, queried_idx)
            loop_rounds += 1
            unqueried = np.delete(remaining, sampled)
            positions, signs = _infer_indices(queried_idx, patterns, unqueried)
            cov = 1.0 if len(unqueried) == 0 else len(positions) / len(unqueried)
            if cov >= threshold:
                break
        labels[queried_idx] = patterns[:, 0]
        labels[unqueried[positions]] = signs
        remaining = np.delete(unqueried, positions)

    if len(remaining) > 0:
        patterns = _query_patterns(instance, oracle, remaining)
        labels[remaining] = patterns[:, 0]
        final_round = True

    return BatchResult(
        labels=labels, iterations=iterations, loop_rounds=loop_rounds, final_round=final_round
    )
