"""Exact reference computations over a window snapshot.

Positions are 1-based and relative to the snapshot (oldest item is 1).
``exact_lis``/``exact_ed`` back the exact-fallback mode; the rest exist to
check the sketch in tests.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import AbstractSet, Sequence, Set


def exact_lis(values: Sequence[int]) -> int:
    """Length of the longest non-decreasing subsequence, O(n log n)."""
    tails: list = []
    for v in values:
        # bisect_right: equal values extend a chain (non-strict order)
        pos = bisect_right(tails, v)
        if pos == len(tails):
            tails.append(v)
        else:
            tails[pos] = v
    return len(tails)


def exact_ed(values: Sequence[int]) -> int:
    """Minimum number of deletions leaving a non-decreasing sequence."""
    return len(values) - exact_lis(values)


def inversions(values: Sequence[int], j: int) -> Set[int]:
    """Positions ``k < j`` holding a value strictly greater than position ``j``."""
    vj = values[j - 1]
    return {k for k in range(1, j) if values[k - 1] > vj}


def exact_R(values: Sequence[int]) -> Set[int]:
    """Positions ``j`` with some ``k < j`` such that strictly more than half of
    positions ``k..j-1`` hold a value greater than ``values[j]``.

    Quadratic; intended as a test oracle.
    """
    out = set()
    for j in range(2, len(values) + 1):
        vj = values[j - 1]
        bigger = 0
        for k in range(j - 1, 0, -1):
            if values[k - 1] > vj:
                bigger += 1
            if 2 * bigger > j - k:
                out.add(j)
                break
    return out


def majority_witness(values: Sequence[int], j: int, threshold: float) -> bool:
    """True if some ``k < j`` has ``|[k, j-1] ∩ inv(j)| > threshold * (j - k)``."""
    vj = values[j - 1]
    bigger = 0
    for k in range(j - 1, 0, -1):
        if values[k - 1] > vj:
            bigger += 1
        if bigger > threshold * (j - k):
            return True
    return False


def pruning_bound(values: Sequence[int], member_set: AbstractSet[int], theta: float = 0.5) -> int:
    """Run the pruning walk that extracts a non-decreasing subsequence.

    Starting from a sentinel ``x = n + 1`` holding +infinity, repeatedly pick the
    largest ``j < x`` that is neither in ``member_set`` nor an inversion of ``x``,
    delete every position strictly between ``j`` and ``x``, and continue from
    ``x = j``.  When no such ``j`` exists the remaining prefix is deleted as well.
    Returns the number of deleted positions, which is at least ``exact_ed``.

    ``theta`` is accepted for symmetry with the bound being checked
    (``len(member_set) >= theta * deleted``); it does not affect the walk.
    """
    if not 0 < theta <= 0.5:
        raise ValueError(f"theta must be in (0, 1/2], got {theta}")
    n = len(values)
    x = n + 1
    deleted = 0
    while x > 1:
        vx = values[x - 1] if x <= n else None
        j = x - 1
        while j >= 1:
            if j not in member_set and (vx is None or values[j - 1] <= vx):
                break
            j -= 1
        # j == 0 means no survivor: the whole prefix [1, x-1] goes
        deleted += x - j - 1
        x = j
    return deleted
