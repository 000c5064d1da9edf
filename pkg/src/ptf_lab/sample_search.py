"""Label-only average-case learner: random probing, then per-gap binary search.

Phase 1 queries uniformly random not-yet-queried points until either every
point has been queried (case "a") or the queried points, read in sorted
order, show d sign flips (case "b").  With a hidden polynomial of exactly d
real roots, d flips pin one root per flip gap, so each gap's boundary is
found by binary search and every other point inherits the sign of its
bracketing queried neighbours.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instances import Instance
from .oracle import Oracle


class DegreeViolation(RuntimeError):
    """More sign flips observed than the promised number of real roots."""


class InvalidDistribution(ValueError):
    """Gap probabilities do not form a distribution."""


@dataclass
class AvgCaseResult:
    labels: np.ndarray
    z: int  # queries spent in the probing phase
    search_queries: int
    case: str  # "a" (exhausted) or "b" (d flips seen)
    flips: int

    @property
    def total(self) -> int:
        return self.z + self.search_queries


def sample_and_search(
    instance: Instance, oracle: Oracle, d_roots: int, rng: np.random.Generator
) -> AvgCaseResult:
    """Perfectly label the sample using label queries only.

    ``d_roots`` is the promised number of distinct real roots of the hidden
    polynomial; phase 1 stops early once that many flips are visible.
    Raises DegreeViolation if more flips than promised ever show up.
    """
    n = instance.n
    points = instance.points
    order_of_query = rng.permutation(n)  # uniform probing without replacement

    queried: list[int] = []  # sorted point indices
    signs: dict[int, int] = {}
    flips = 0
    z = 0
    case = "a"

    def flip_delta(pos: int, idx: int, s: int) -> int:
        delta = 0
        left = queried[pos - 1] if pos > 0 else None
        right = queried[pos] if pos < len(queried) else None
        if left is not None and signs[left] != s:
            delta += 1
        if right is not None and signs[right] != s:
            delta += 1
        if left is not None and right is not None and signs[left] != signs[right]:
            delta -= 1
        return delta

    for idx in order_of_query:
        idx = int(idx)
        s = oracle.query(points[idx], 0)
        z += 1
        pos = bisect.bisect_left(queried, idx)
        flips += flip_delta(pos, idx, s)
        queried.insert(pos, idx)
        signs[idx] = s
        if flips > d_roots:
            raise DegreeViolation(f"{flips} flips seen but only {d_roots} roots promised")
        if flips == d_roots and d_roots > 0:
            case = "b"
            break

    labels = np.zeros(n, dtype=np.int8)
    search_queries = 0

    if case == "a":
        for idx, s in signs.items():
            labels[idx] = s
        return AvgCaseResult(labels=labels, z=z, search_queries=search_queries, case="a", flips=flips)

    # locate each flip boundary among the points strictly inside its gap
    boundaries = []  # index b: sign changes between points b and b+1
    for qpos in range(len(queried) - 1):
        lo, hi = queried[qpos], queried[qpos + 1]
        if signs[lo] == signs[hi]:
            continue
        s_lo = signs[lo]
        a, b = lo, hi
        while b - a > 1:
            mid = (a + b) // 2
            s_mid = oracle.query(points[mid], 0)
            search_queries += 1
            if s_mid == s_lo:
                a = mid
            else:
                b = mid
        boundaries.append(a)

    first_sign = signs[queried[0]]
    sign = first_sign
    prev = 0
    for b in sorted(boundaries):
        labels[prev : b + 1] = sign
        sign = -sign
        prev = b + 1
    labels[prev:] = sign
    return AvgCaseResult(labels=labels, z=z, search_queries=search_queries, case="b", flips=flips)


def capped_coupon_statistic(gaps: Sequence[float], n: int, rng: np.random.Generator) -> int:
    """Draws from the categorical gap distribution until every category is
    seen, capped at n draws; returns min(draws-to-complete, n)."""
    gaps = np.asarray(gaps, dtype=np.float64)
    if np.any(gaps < 0) or abs(float(gaps.sum()) - 1.0) > 1e-12:
        raise InvalidDistribution("gap probabilities must be non-negative and sum to 1")
    if n < 1:
        raise ValueError("cap must be at least 1")
    k = len(gaps)
    cum = np.cumsum(gaps)
    cum[-1] = 1.0
    seen = np.zeros(k, dtype=bool)
    unseen = k
    drawn = 0
    chunk = 64
    while drawn < n:
        size = min(chunk, n - drawn)
        cats = np.searchsorted(cum, rng.random(size), side="right")
        for c in cats:
            drawn += 1
            if not seen[c]:
                seen[c] = True
                unseen -= 1
                if unseen == 0:
                    return drawn
        chunk = min(4 * chunk, 1 << 16)
    return n
