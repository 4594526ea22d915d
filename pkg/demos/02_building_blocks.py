"""The two summaries underneath the estimator, used on their own.

QuantileSummary answers approximate quantiles of any suffix of the window.
TokenCounter counts tokens whose timestamps fall in the window even when they
are added out of order.

Run:  python3 demos/02_building_blocks.py
"""

import numpy as np

from edwindow import QuantileSummary, TokenCounter

rng = np.random.default_rng(0)

# --- suffix quantiles -----------------------------------------------------
w, eps_q = 4096, 0.05
q = QuantileSummary(w, eps_q, exact_span=320)  # small ring so blocks get used
data = rng.lognormal(mean=3, sigma=1, size=20_000).astype(np.int64) + 1
for v in data:
    q.insert(int(v))

for wp in (10, 500, 4096):
    suffix = np.sort(data[-wp:])
    a = q.query(wp, 0.5)
    # with ties a value covers a run of ranks
    first, last = np.searchsorted(suffix, a, "left") + 1, np.searchsorted(suffix, a, "right")
    print(f"median of newest {wp:5d}: {a:5d}  ranks {first}..{last} of {wp}, target {wp / 2:.0f} +- {eps_q * wp:.1f}")
print("entries kept:", q.retained_entries(), "blocks:", len(q._blocks))

# --- out-of-order counting -------------------------------------------------
w, eps_c = 2048, 0.02
c = TokenCounter(w, eps_c)
stamps = []
for now in range(1, 6000):
    # each step files one token somewhere in the live window
    k = int(rng.integers(max(1, now - w + 1), now + 1))
    c.add(k, now)
    stamps.append(k)

now = 5999
stamps = np.array(stamps)
live = int(np.count_nonzero(stamps >= now - w + 1))
lo, hi = c.bounds(now)
print(f"live tokens {live}, estimate {c.estimate(now):.1f}, certified [{lo:.0f}, {hi:.0f}]")
