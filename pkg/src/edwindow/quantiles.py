"""Deterministic quantile summary over every suffix of a sliding window.

Layout, newest items first:

* an exact ring holding the newest ``exact_span`` (up to ``exact_span + s0 - 1``)
  values;
* sealed blocks, each a rank-bounded summary of a contiguous run of older
  items.  Blocks are created with ``s0`` items and merged pairwise in
  exponential-histogram fashion (at most ``m`` blocks per size class), so a
  block's size never exceeds ``eps/4`` times the number of items newer than it.

A summary entry ``(value, rmin, rmax)`` asserts that some element equal to
``value`` sits at a position in ``[rmin, rmax]`` of the block's sorted order.
The largest ``rmax[t+1] - 1 - rmin[t]`` over consecutive entries (plus the two
ends) is the block's ``gap``; it bounds the rank uncertainty the block adds to
a query.  Gaps are kept below ``eps/4`` times the block size.

For a suffix longer than the ring, the query uses the ring and every block
lying entirely inside the suffix; the one block straddling the suffix start is
ignored.  Its unseen part plus the summed gaps stay within ``eps/2`` of the
suffix length, which fits inside the ``±eps`` rank tolerance once the suffix
exceeds ``4/eps`` items (the ring is never shorter than that).
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np

from .core import QueryError

_TINY = 1e-9


def target_rank(phi: float, n: int) -> int:
    """Rank the exact path returns: ``ceil(phi * n)`` clamped to ``[1, n]``."""
    return min(n, max(1, math.ceil(phi * n - _TINY)))


def rank_window(phi: float, eps: float, n: int):
    """Admissible integer ranks ``[lo, hi]`` for an eps-approximate phi-quantile.

    The real interval ``[(phi-eps)n, (phi+eps)n]`` is rounded outward to whole
    ranks (it may contain no integer when ``eps*n < 1/2``) and clamped to
    ``[1, n]``.
    """
    lo = max(1, math.floor((phi - eps) * n + _TINY))
    hi = min(n, max(1, math.ceil((phi + eps) * n - _TINY)))
    return lo, hi


def _class_budget(j: int) -> float:
    # fraction of the gap allowance a class-j block may use; increasing in j
    # and bounded by 1, independent of the window size
    return 0.5 + 3.0 / math.pi**2 * sum(1.0 / t**2 for t in range(1, j + 1))


class _Block:
    __slots__ = ("newest", "size", "cls", "vals", "rmin", "rmax", "gap", "lb", "delta")

    def __init__(self, newest, size, cls, vals, rmin, rmax):
        self.newest = newest
        self.size = size
        self.cls = cls
        self.vals = vals
        self.rmin = rmin
        self.rmax = rmax
        self.gap = _gap(rmin, rmax, size)
        # lb[t]: elements certainly <= vals[t]; delta: its increments
        self.lb = np.maximum.accumulate(rmin)
        self.delta = np.diff(self.lb, prepend=0)

    def __len__(self):
        return len(self.vals)


def _gap(rmin, rmax, size) -> int:
    g = max(int(rmax[0]) - 1, size - int(rmin[-1]))
    if len(rmin) > 1:
        g = max(g, int((rmax[1:] - 1 - rmin[:-1]).max()))
    return g


def _prune(vals, rmin, rmax, target):
    """Greedily drop entries while every gap stays <= target."""
    n = len(vals)
    if n <= 2:
        return vals, rmin, rmax
    rmin_l = rmin.tolist()
    rmax_l = rmax.tolist()
    keep = [0]
    last = 0
    for t in range(1, n - 1):
        if rmax_l[t + 1] - 1 - rmin_l[last] > target:
            keep.append(t)
            last = t
    keep.append(n - 1)
    idx = np.asarray(keep)
    return vals[idx], rmin[idx], rmax[idx]


def _combine(a: _Block, b: _Block):
    """Union of two summaries; ties order ``a``'s entries first."""
    na, nb = a.size, b.size
    # a-entry x: b elements before it are those < x
    pos = np.searchsorted(b.vals, a.vals, side="left")
    lo_b = np.where(pos > 0, b.rmin[np.maximum(pos - 1, 0)], 0)
    hi_b = np.where(pos < len(b.vals), b.rmax[np.minimum(pos, len(b.vals) - 1)] - 1, nb)
    # b-entry y: a elements before it are those <= y
    pos = np.searchsorted(a.vals, b.vals, side="right")
    lo_a = np.where(pos > 0, a.rmin[np.maximum(pos - 1, 0)], 0)
    hi_a = np.where(pos < len(a.vals), a.rmax[np.minimum(pos, len(a.vals) - 1)] - 1, na)

    vals = np.concatenate([a.vals, b.vals])
    rmin = np.concatenate([a.rmin + lo_b, b.rmin + lo_a])
    rmax = np.concatenate([a.rmax + hi_b, b.rmax + hi_a])
    src = np.concatenate([np.zeros(len(a.vals), np.int8), np.ones(len(b.vals), np.int8)])
    order = np.lexsort((src, vals))
    return vals[order], rmin[order], rmax[order]


class QuantileSummary:
    """eps-approximate phi-quantiles of any suffix of the last ``w`` values.

    ``w=None`` keeps an unbounded history (whole-stream use).  ``exact_span``
    overrides how many of the newest values are stored verbatim; it must be
    at least ``ceil(4/eps)``.  The default stores verbatim everything young
    enough that a block of that age could not be compressed anyway.
    """

    def __init__(self, w: Optional[int], eps: float, exact_span: Optional[int] = None):
        if w is not None and w < 1:
            raise ValueError(f"w must be >= 1, got {w}")
        if not 0 < eps <= 1:
            raise ValueError(f"eps must be in (0, 1], got {eps}")
        self.w = w
        self.eps = eps
        self.alpha = eps / 4
        self.beta = eps / 4
        min_span = math.ceil(4 / eps)
        if exact_span is None:
            exact_span = max(min_span, math.ceil(1 / (self.alpha * self.beta)))
        elif exact_span < min_span:
            raise ValueError(f"exact_span must be >= {min_span} for eps={eps}")
        self.exact_span = exact_span
        self.s0 = max(1, int(self.alpha * exact_span))
        self.max_per_class = math.ceil(2 / self.alpha) + 1

        cap = exact_span + self.s0 - 1
        self.blocks_enabled = w is None or w > cap
        if not self.blocks_enabled:
            cap = w
        self._cap = cap
        self._buf = np.zeros(2 * cap, dtype=np.int64)
        self._head = 0
        self._n = 0
        self.count_seen = 0
        # oldest first; class sizes are non-increasing along the list
        self._blocks: List[_Block] = []
        self._per_class: dict = {}

    # ------------------------------------------------------------------ update

    def insert(self, value: int) -> None:
        """Append ``value`` as the newest element and expire old blocks."""
        if self._n == self._cap:
            if self.blocks_enabled:
                self._seal()
            else:
                self._n -= 1
        cap = self._cap
        h = self._head - 1
        if h < 0:
            h += cap
        self._buf[h] = value
        self._buf[h + cap] = value
        self._head = h
        self._n += 1
        self.count_seen += 1
        if self.w is not None and self._blocks:
            cutoff = self.count_seen - self.w
            while self._blocks and self._blocks[0].newest <= cutoff:
                old = self._blocks.pop(0)
                self._per_class[old.cls] -= 1

    def _seal(self):
        s0 = self.s0
        h = self._head
        oldest = self._buf[h + self._n - s0 : h + self._n]
        vals = np.sort(oldest)
        ranks = np.arange(1, s0 + 1, dtype=np.int64)
        # newest index of the sealed run: everything still in the ring is newer
        newest = self.count_seen - (self._n - s0)
        target = int(self.beta * _class_budget(0) * s0)
        vals, rmin, rmax = _prune(vals, ranks, ranks.copy(), target)
        self._blocks.append(_Block(newest, s0, 0, vals, rmin, rmax))
        self._per_class[0] = self._per_class.get(0, 0) + 1
        self._n -= s0
        self._cascade()

    def _cascade(self):
        j = 0
        while self._per_class.get(j, 0) > self.max_per_class:
            # classes are non-increasing oldest to newest, so the oldest class-j
            # block sits right after every block of a higher class
            k = sum(c for cls, c in self._per_class.items() if cls > j)
            older, newer = self._blocks[k], self._blocks[k + 1]
            vals, rmin, rmax = _combine(older, newer)
            size = older.size + newer.size
            target = max(int(self.beta * _class_budget(j + 1) * size), older.gap + newer.gap)
            vals, rmin, rmax = _prune(vals, rmin, rmax, target)
            self._blocks[k : k + 2] = [_Block(newer.newest, size, j + 1, vals, rmin, rmax)]
            self._per_class[j] -= 2
            self._per_class[j + 1] = self._per_class.get(j + 1, 0) + 1
            j += 1

    # ------------------------------------------------------------------ queries

    @property
    def ring_len(self) -> int:
        return self._n

    def newest(self, n: int) -> np.ndarray:
        """The ``n`` newest values, newest first (``n`` at most ``ring_len``)."""
        return self._buf[self._head : self._head + n]

    def retained_entries(self) -> int:
        return self._n + sum(len(b) for b in self._blocks)

    def _check(self, w_prime, phi):
        limit = self.count_seen if self.w is None else min(self.w, self.count_seen)
        if not 1 <= w_prime <= limit:
            raise QueryError(f"w_prime must be in [1, {limit}], got {w_prime}")
        if not 0 <= phi <= 1:
            raise QueryError(f"phi must be in [0, 1], got {phi}")

    def _parts(self, w_prime):
        """Blocks lying entirely inside the suffix, plus the straddle's in-suffix count."""
        need = w_prime - self._n
        used = []
        for b in reversed(self._blocks):
            if need <= 0:
                break
            if b.size <= need:
                used.append(b)
                need -= b.size
            else:
                break
        return used, max(need, 0)

    def query(self, w_prime: int, phi: float) -> int:
        """An eps-approximate phi-quantile of the newest ``w_prime`` values."""
        self._check(w_prime, phi)
        if w_prime <= self._n:
            part = self.newest(w_prime)
            r = target_rank(phi, w_prime)
            return int(np.partition(part, r - 1)[r - 1])
        blocks, _ = self._parts(w_prime)
        vals, deltas = self._weighted_entries(blocks)
        order = np.argsort(vals, kind="stable")
        vals = vals[order]
        cum = np.cumsum(deltas[order])
        theta = max(1, math.ceil((phi - self.eps) * w_prime - _TINY))
        # lower bound on #(<= c) is the cumulative sum at c's last occurrence
        last = np.append(vals[1:] != vals[:-1], True)
        ok = np.nonzero(last & (cum >= theta))[0]
        return int(vals[ok[0]])

    def _weighted_entries(self, blocks):
        ring = np.sort(self.newest(self._n))
        vals = [ring]
        deltas = [np.ones(len(ring), dtype=np.int64)]
        for b in blocks:
            vals.append(b.vals)
            deltas.append(b.delta)
        return np.concatenate(vals), np.concatenate(deltas)

    def rank_lower_bound(self, v: int, w_prime: int) -> int:
        """Certified lower bound on how many of the newest ``w_prime`` values are ``<= v``.

        Matches the count the approximate (block) query path uses.
        """
        if w_prime <= self._n:
            return int(np.count_nonzero(self.newest(w_prime) <= v))
        blocks, _ = self._parts(w_prime)
        total = int(np.count_nonzero(self.newest(self._n) <= v))
        for b in blocks:
            total += _block_lb(b, v)
        return total

    def first_exceeding(self, v: int, lengths: Sequence[int], phi: float) -> Optional[int]:
        """Position in ``lengths`` of the first suffix length whose quantile exceeds ``v``.

        Equivalent to calling :meth:`query` for each length in order and
        comparing with ``v``, but evaluated as rank counts in bulk.  ``lengths``
        must be ascending and valid for :meth:`query`.
        """
        lengths = np.asarray(lengths, dtype=np.int64)
        if len(lengths) == 0:
            return None
        n_exact = int(np.searchsorted(lengths, self._n, side="right"))
        start = 0
        chunk = 64
        while start < n_exact:
            stop = min(n_exact, start + chunk)
            ls = lengths[start:stop]
            counts = _prefix_counts(self.newest(int(ls[-1])) <= v, ls)
            ranks = np.clip(np.ceil(phi * ls - _TINY), 1, ls)
            hit = np.nonzero(counts < ranks)[0]
            if len(hit):
                return start + int(hit[0])
            start = stop
            chunk *= 4
        if n_exact == len(lengths):
            return None
        return self._first_exceeding_blocks(v, lengths, n_exact, phi)

    def _first_exceeding_blocks(self, v, lengths, start, phi):
        base = int(np.count_nonzero(self.newest(self._n) <= v))
        newest_first = self._blocks[::-1]
        sizes = np.cumsum([b.size for b in newest_first])
        lbs = np.cumsum([_block_lb(b, v) for b in newest_first])
        ls = lengths[start:]
        # number of blocks entirely inside each suffix
        inside = np.searchsorted(sizes, ls - self._n, side="right")
        covered = base + np.where(inside > 0, lbs[np.maximum(inside - 1, 0)], 0)
        theta = np.maximum(1, np.ceil((phi - self.eps) * ls - _TINY))
        hit = np.nonzero(covered < theta)[0]
        return start + int(hit[0]) if len(hit) else None


def _prefix_counts(mask: np.ndarray, ls: np.ndarray) -> np.ndarray:
    # true entries among the first l of mask, for each (distinct, ascending) l in ls
    starts = np.concatenate(([0], ls[:-1]))
    return np.cumsum(np.add.reduceat(mask[: ls[-1]], starts, dtype=np.int64))


def _block_lb(b: _Block, v) -> int:
    t = int(np.searchsorted(b.vals, v, side="right"))
    if t == 0:
        return 0
    return int(b.lb[t - 1])
