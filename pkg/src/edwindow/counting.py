"""Relative-error count of out-of-order timestamped tokens in a sliding window.

Tokens carry a timestamp ``k`` and may arrive in any order, provided ``k`` is
inside the live window ``[now - w + 1, now]`` when added.  The estimate of
``t`` (tokens whose timestamp is live) satisfies ``|t_hat - t| <= eps * t``.

Structure
---------
Timestamps live on a dyadic tree whose top nodes span ``2**H >= w`` ticks.
Several resolutions are kept side by side:

* an exact map ``timestamp -> count`` for the newest timestamps;
* levels ``l = 0 .. L-1`` in which a tree node counts tokens until it holds
  ``2**l`` of them and then *closes*, later tokens descending to its children;
* a coarse level whose top nodes never close.

Every store except the coarse one has a node budget.  Over budget, it drops its
oldest node and from then on only answers for timestamps at or after its
``floor``.  A store whose floor is at or below the window start bounds ``t``
from both sides: nodes wholly inside the window are exact, and the at most
``H + 1`` nodes straddling the window start add at most ``(H + 1) * 2**l``
uncertainty.  A store that has dropped past the window start still gives a
lower bound, and a large one (it only drops when it holds many full nodes),
which is what makes the next coarser store's uncertainty small relative to
``t``.  The estimate is the midpoint of the tightest certified bracket.
"""

from __future__ import annotations

import heapq
import math
from typing import Dict, List, Optional, Tuple

from .core import ContractError

_Node = Tuple[int, int]  # (height, offset): ticks [offset << height, ((offset + 1) << height) - 1]


def _end(h: int, a: int) -> int:
    return ((a + 1) << h) - 1


class _Level:
    __slots__ = ("cap", "budget", "nodes", "heap", "floor", "total")

    def __init__(self, cap: Optional[int], budget: Optional[int]):
        self.cap = cap
        self.budget = budget
        self.nodes: Dict[_Node, int] = {}
        self.heap: List[Tuple[int, int, int]] = []
        self.floor = -1
        self.total = 0

    def add(self, ts: int, top: int) -> None:
        if ts < self.floor:
            return
        nodes = self.nodes
        cap = self.cap
        for h in range(top, -1, -1):
            key = (h, ts >> h)
            c = nodes.get(key)
            if c is None:
                nodes[key] = 1
                heapq.heappush(self.heap, (_end(*key), h, key[1]))
                break
            if cap is None or c < cap or h == 0:
                nodes[key] = c + 1
                break
        self.total += 1
        if self.budget is not None and len(nodes) > self.budget:
            end, h, a = heapq.heappop(self.heap)
            self.total -= nodes.pop((h, a))
            self.floor = end + 1
            self._drop_before(self.floor)

    def _drop_before(self, t: int) -> None:
        heap = self.heap
        while heap and heap[0][0] < t:
            _, h, a = heapq.heappop(heap)
            self.total -= self.nodes.pop((h, a))

    def bracket(self, lo: int, top: int) -> Tuple[int, int]:
        """(tokens surely at or after ``lo``, tokens possibly straddling ``lo``)."""
        straddle = 0
        for h in range(1, top + 1):
            a = lo >> h
            if (a << h) < lo:
                straddle += self.nodes.get((h, a), 0)
        return self.total - straddle, straddle


class TokenCounter:
    """Approximate count of tokens whose timestamp lies in the live window.

    ``max_tokens`` bounds how many live tokens a window may hold; it sizes the
    level stack (the guarantee holds up to that many).  ``w=None`` counts every
    token ever added.
    """

    def __init__(self, w: Optional[int], eps: float, max_tokens: Optional[int] = None):
        if w is not None and w < 1:
            raise ValueError(f"w must be >= 1, got {w}")
        if not 0 < eps <= 1:
            raise ValueError(f"eps must be in (0, 1], got {eps}")
        self.w = w
        self.eps = eps
        self.total = 0
        self.min_ts: Optional[int] = None
        self.now = 0
        if w is None:
            self.levels: List[_Level] = []
            self.exact: Dict[int, int] = {}
            return
        self.height = max(0, math.ceil(math.log2(w))) if w > 1 else 0
        hp1 = self.height + 1
        if max_tokens is None:
            max_tokens = w
        self.max_tokens = max_tokens
        n_levels = math.ceil(math.log2(eps * max_tokens / hp1 + 1)) + 1
        budget = math.ceil(3 * hp1 / eps) + 4 * self.height + 6
        self.levels = [_Level(1 << l, budget) for l in range(n_levels)]
        self.levels.append(_Level(None, None))
        self.exact_budget = math.ceil(hp1 / (2 * eps)) + 1
        self.exact = {}
        self._exact_heap: List[int] = []
        self._exact_sum = 0
        self._exact_floor = -1

    # ------------------------------------------------------------------ update

    def add(self, timestamp: int, now: int) -> None:
        """Record a token with ``timestamp``; ``now`` is the current index."""
        if timestamp > now:
            raise ContractError(f"timestamp {timestamp} is in the future (now={now})")
        if self.w is not None and now - timestamp >= self.w:
            raise ContractError(f"timestamp {timestamp} is outside the window ending at {now}")
        if now < self.now:
            raise ContractError(f"now went backwards: {now} < {self.now}")
        self.now = now
        self.total += 1
        if self.min_ts is None or timestamp < self.min_ts:
            self.min_ts = timestamp
        if self.w is None:
            return
        self._expire(now - self.w + 1)
        if timestamp >= self._exact_floor:
            if timestamp in self.exact:
                self.exact[timestamp] += 1
            else:
                self.exact[timestamp] = 1
                heapq.heappush(self._exact_heap, timestamp)
            self._exact_sum += 1
            if len(self.exact) > self.exact_budget:
                ts = heapq.heappop(self._exact_heap)
                self._exact_sum -= self.exact.pop(ts)
                self._exact_floor = ts + 1
        for level in self.levels:
            level.add(timestamp, self.height)

    def _expire(self, lo: int) -> None:
        heap = self._exact_heap
        while heap and heap[0] < lo:
            self._exact_sum -= self.exact.pop(heapq.heappop(heap))
        for level in self.levels:
            level._drop_before(lo)

    # ------------------------------------------------------------------ queries

    def bounds(self, now: int) -> Tuple[float, float]:
        """Certified ``(lower, upper)`` bounds on the live token count."""
        if now < 1:
            raise ContractError(f"now must be >= 1, got {now}")
        if self.w is None or self.total == 0:
            return float(self.total), float(self.total)
        lo = now - self.w + 1
        if self.min_ts is not None and lo <= self.min_ts:
            # nothing can have expired yet
            return float(self.total), float(self.total)
        self._expire(lo)
        if self._exact_floor <= lo:
            return float(self._exact_sum), float(self._exact_sum)
        lower = self._exact_sum
        upper = math.inf
        for level in self.levels:
            sure, unsure = level.bracket(lo, self.height)
            lower = max(lower, sure)
            if level.floor <= lo:
                upper = min(upper, sure + unsure)
        return float(lower), float(upper)

    def estimate(self, now: int) -> float:
        lower, upper = self.bounds(now)
        return (lower + upper) / 2

    def retained_entries(self) -> int:
        return len(self.exact) + sum(len(level.nodes) for level in self.levels)
