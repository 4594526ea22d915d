"""Sliding-window estimator of the edit distance to monotonicity.

On each arrival the estimator probes suffixes of the window that ends just
before the new item, shortest first.  A probe of length ``l`` asks the
quantile summary for the ``(1/2 - eps')``-quantile of those ``l`` values; the
first probe whose answer exceeds the new value attaches one token to the item
``l`` positions back.  Only lengths ``ceil((1 + eps'/2)**j)`` are probed, the
summary being built with accuracy ``eps'/2`` so each probe also covers the
lengths up to the next one.

The reported estimate is the live token count (tokens whose timestamp is
still inside the window) divided by ``(1/2 - 2 eps')(1 - eps')``.  With
``eps' = eps / 35`` it lies in ``[ed, (4 + eps) ed]``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

import numpy as np

from .core import ContractError, Mode, QueryError, StreamItem, WindowConfig, WindowSpan, validate_config, window_span
from .counting import TokenCounter
from .oracle import exact_ed
from .quantiles import QuantileSummary


@dataclass(frozen=True)
class EdEstimate:
    value: float
    window_span: WindowSpan
    epsilon: float
    exact: bool = False

    @property
    def lower_bound_claim(self) -> float:
        """Smallest edit distance consistent with the guarantee."""
        return self.value if self.exact else self.value / (4 + self.epsilon)


def probe_lengths(eps_prime: float, limit: int) -> List[int]:
    """Distinct values of ``ceil((1 + eps'/2)**j)`` up to ``limit``."""
    growth = 1 + eps_prime / 2
    out: List[int] = []
    j = 0
    while True:
        length = math.ceil(growth**j)
        if length > limit:
            return out
        if not out or length != out[-1]:
            out.append(length)
        j += 1


def max_probes(eps_prime: float, w: int) -> int:
    """Upper bound on quantile queries per arrival for window ``w``."""
    return math.ceil(math.log(w) / math.log1p(eps_prime / 2)) + 1


class EdEstimator:
    """(4 + eps)-approximate edit distance to monotonicity of the last ``w`` items.

    ``w=None`` selects the whole-stream model.  When ``epsilon <= 1/w`` the
    window is stored outright and the answer is exact.

    ``instrument=True`` records every (arrival, token timestamp) pair so tests
    can inspect the detected set; it costs memory linear in the stream.
    """

    def __init__(self, w: Optional[int], epsilon: float, *, instrument: bool = False,
                 exact_span: Optional[int] = None):
        self.config: WindowConfig = validate_config(w, epsilon)
        self.current_index = 0
        self.instrument = instrument
        self.token_log: List[Tuple[int, int]] = []
        self.last_probe_count = 0
        self.max_probe_count = 0
        self.total_probe_count = 0
        eps_p = self.config.epsilon_prime
        self.phi = 0.5 - eps_p
        self.scale = (0.5 - 2 * eps_p) * (1 - eps_p)
        if self.config.mode is Mode.EXACT_FALLBACK:
            self.window: Optional[deque] = deque(maxlen=w)
            self.quantiles = None
            self.tokens = None
            self._probes = np.zeros(0, dtype=np.int64)
            return
        self.window = None
        self.quantiles = QuantileSummary(w, eps_p / 2, exact_span=exact_span)
        self.tokens = TokenCounter(w, eps_p, max_tokens=w)
        limit = w - 1 if w is not None else 1024
        self._probes = np.asarray(probe_lengths(eps_p, limit), dtype=np.int64)
        self._probe_limit = limit

    @property
    def w(self) -> Optional[int]:
        return self.config.w

    @property
    def epsilon(self) -> float:
        return self.config.epsilon

    @property
    def mode(self) -> Mode:
        return self.config.mode

    def _lengths_upto(self, limit: int) -> np.ndarray:
        if limit > self._probe_limit:
            # whole-stream model: extend the probe schedule as the stream grows
            self._probe_limit = max(limit, 2 * self._probe_limit)
            self._probes = np.asarray(probe_lengths(self.config.epsilon_prime, self._probe_limit), dtype=np.int64)
        return self._probes[: int(np.searchsorted(self._probes, limit, side="right"))]

    def arrive(self, item: StreamItem) -> Optional[int]:
        """Process the next arrival; returns the token timestamp attached, if any."""
        i = item.index
        if i != self.current_index + 1:
            raise ContractError(f"expected index {self.current_index + 1}, got {i}")
        v = item.value
        if self.window is not None:
            self.window.append(v)
            self.current_index = i
            return None
        limit = i - 1 if self.w is None else min(self.w - 1, i - 1)
        lengths = self._lengths_upto(limit)
        k = None
        if len(lengths):
            # probes read the summary before v joins it
            pos = self.quantiles.first_exceeding(v, lengths, self.phi)
            issued = len(lengths) if pos is None else pos + 1
            if pos is not None:
                k = i - int(lengths[pos])
                self.tokens.add(k, i)
                if self.instrument:
                    self.token_log.append((i, k))
        else:
            issued = 0
        self.last_probe_count = issued
        self.max_probe_count = max(self.max_probe_count, issued)
        self.total_probe_count += issued
        self.quantiles.insert(v)
        self.current_index = i
        return k

    def push(self, value: int) -> Optional[int]:
        """Convenience wrapper: feed ``value`` as the next arrival."""
        return self.arrive(StreamItem(self.current_index + 1, value))

    def extend(self, values) -> None:
        for v in values:
            self.push(v)

    def query(self) -> EdEstimate:
        """Current estimate for the live window."""
        i = self.current_index
        if i == 0:
            raise QueryError("no items have arrived yet")
        span = window_span(i, self.w)
        if self.window is not None:
            return EdEstimate(float(exact_ed(list(self.window))), span, self.epsilon, exact=True)
        t_hat = self.tokens.estimate(i)
        return EdEstimate(t_hat / self.scale, span, self.epsilon)

    def tokens_live(self) -> Set[int]:
        """Arrivals whose token timestamp is still inside the window."""
        if not self.instrument:
            raise NotImplementedError("construct with instrument=True to track tokens")
        lo = window_span(self.current_index, self.w).lo
        return {j for j, k in self.token_log if k >= lo}

    def retained_entries(self) -> int:
        if self.window is not None:
            return len(self.window)
        return self.quantiles.retained_entries() + self.tokens.retained_entries()

    def to_bytes(self) -> bytes:
        from .persist import dump_estimator

        return dump_estimator(self)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "EdEstimator":
        from .persist import load_estimator

        return load_estimator(blob)


# functional aliases mirroring the operation names used in the docs
def ed_arrive(e: EdEstimator, item: StreamItem) -> EdEstimator:
    e.arrive(item)
    return e


def ed_query(e: EdEstimator) -> EdEstimate:
    return e.query()


def ed_tokens_live(e: EdEstimator) -> Set[int]:
    return e.tokens_live()
