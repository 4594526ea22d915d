"""Binary checkpoint format for :class:`EdEstimator` (layout in docs/FORMAT.md).

All integers are little-endian.  Values are stored as signed 64-bit, so a
checkpoint can only hold streams whose values fit in int64.
"""

from __future__ import annotations

import heapq
import struct

import numpy as np

from .core import Mode
from .counting import TokenCounter, _end
from .quantiles import QuantileSummary, _Block

MAGIC = b"EDWS"
VERSION = 1

_HEADER = struct.Struct("<4sHBBQdQ")  # magic, version, mode, flags, w, epsilon, index
_STATS = struct.Struct("<QQQ")


class FormatError(ValueError):
    pass


class _Writer:
    def __init__(self):
        self.parts = []

    def pack(self, fmt, *args):
        self.parts.append(struct.pack("<" + fmt, *args))

    def array(self, arr, dtype):
        arr = np.asarray(arr, dtype=dtype)
        self.pack("I", len(arr))
        self.parts.append(arr.astype(np.dtype(dtype).newbyteorder("<"), copy=False).tobytes())

    def getvalue(self):
        return b"".join(self.parts)


class _Reader:
    def __init__(self, blob):
        self.blob = memoryview(blob)
        self.pos = 0

    def unpack(self, fmt):
        s = struct.Struct("<" + fmt)
        if self.pos + s.size > len(self.blob):
            raise FormatError("truncated checkpoint")
        out = s.unpack_from(self.blob, self.pos)
        self.pos += s.size
        return out if len(out) > 1 else out[0]

    def array(self, dtype):
        n = self.unpack("I")
        dt = np.dtype(dtype).newbyteorder("<")
        size = n * dt.itemsize
        if self.pos + size > len(self.blob):
            raise FormatError("truncated checkpoint")
        out = np.frombuffer(self.blob[self.pos : self.pos + size], dtype=dt).astype(dtype)
        self.pos += size
        return out


def dump_estimator(e) -> bytes:
    out = _Writer()
    mode = 1 if e.mode is Mode.EXACT_FALLBACK else 0
    out.parts.append(_HEADER.pack(MAGIC, VERSION, mode, int(e.instrument),
                                  e.w or 0, e.epsilon, e.current_index))
    out.parts.append(_STATS.pack(e.last_probe_count, e.max_probe_count, e.total_probe_count))
    if e.window is not None:
        out.array(list(e.window), np.int64)
    else:
        _dump_quantiles(out, e.quantiles)
        _dump_counter(out, e.tokens)
    log = np.asarray(e.token_log, dtype=np.int64).reshape(-1)
    out.array(log, np.int64)
    return out.getvalue()


def _dump_quantiles(out, q: QuantileSummary):
    out.pack("QQ", q.exact_span, q.count_seen)
    out.array(q.newest(q.ring_len), np.int64)
    out.pack("I", len(q._blocks))
    for b in q._blocks:
        out.pack("QQI", b.newest, b.size, b.cls)
        out.array(b.vals, np.int64)
        out.array(b.rmin, np.int64)
        out.array(b.rmax, np.int64)


def _dump_counter(out, c: TokenCounter):
    out.pack("QqQ", c.total, -1 if c.min_ts is None else c.min_ts, c.now)
    if c.w is None:
        return
    out.pack("q", c._exact_floor)
    items = sorted(c.exact.items())
    out.array([k for k, _ in items], np.int64)
    out.array([v for _, v in items], np.int64)
    out.pack("I", len(c.levels))
    for level in c.levels:
        out.pack("q", level.floor)
        keys = sorted(level.nodes)
        out.array([h for h, _ in keys], np.int64)
        out.array([a for _, a in keys], np.int64)
        out.array([level.nodes[k] for k in keys], np.int64)


def load_estimator(blob: bytes):
    from .estimator import EdEstimator

    r = _Reader(blob)
    if len(blob) < _HEADER.size:
        raise FormatError("truncated checkpoint")
    magic, version, mode, flags, w, epsilon, index = _HEADER.unpack_from(blob, 0)
    r.pos = _HEADER.size
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    last, mx, total = r.unpack("QQQ")
    w = w or None
    exact_span = None
    if mode == 0:
        # peek the exact span so the summary is rebuilt with the same geometry
        exact_span = struct.unpack_from("<Q", blob, r.pos)[0]
    e = EdEstimator(w, epsilon, instrument=bool(flags), exact_span=exact_span)
    e.current_index = index
    e.last_probe_count, e.max_probe_count, e.total_probe_count = last, mx, total
    if mode == 1:
        e.window.extend(int(v) for v in r.array(np.int64))
    else:
        _load_quantiles(r, e.quantiles)
        _load_counter(r, e.tokens)
    log = r.array(np.int64).reshape(-1, 2)
    e.token_log = [(int(j), int(k)) for j, k in log]
    if r.pos != len(blob):
        raise FormatError("trailing bytes in checkpoint")
    return e


def _load_quantiles(r, q: QuantileSummary):
    q.exact_span, q.count_seen = r.unpack("QQ")
    ring = r.array(np.int64)
    cap = q._cap
    n = len(ring)
    q._head = 0
    q._n = n
    q._buf[:n] = ring
    q._buf[cap : cap + n] = ring
    q._blocks = []
    q._per_class = {}
    for _ in range(r.unpack("I")):
        newest, size, cls = r.unpack("QQI")
        vals, rmin, rmax = r.array(np.int64), r.array(np.int64), r.array(np.int64)
        q._blocks.append(_Block(newest, size, cls, vals, rmin, rmax))
        q._per_class[cls] = q._per_class.get(cls, 0) + 1


def _load_counter(r, c: TokenCounter):
    c.total, min_ts, c.now = r.unpack("QqQ")
    c.min_ts = None if min_ts < 0 else min_ts
    if c.w is None:
        return
    c._exact_floor = r.unpack("q")
    keys, counts = r.array(np.int64), r.array(np.int64)
    c.exact = {int(k): int(v) for k, v in zip(keys, counts)}
    c._exact_heap = sorted(c.exact)
    c._exact_sum = int(counts.sum())
    if r.unpack("I") != len(c.levels):
        raise FormatError("level count does not match configuration")
    for level in c.levels:
        level.floor = r.unpack("q")
        hs, offs, counts = r.array(np.int64), r.array(np.int64), r.array(np.int64)
        level.nodes = {(int(h), int(a)): int(n) for h, a, n in zip(hs, offs, counts)}
        level.heap = [(_end(h, a), h, a) for h, a in level.nodes]
        heapq.heapify(level.heap)
        level.total = int(counts.sum())
