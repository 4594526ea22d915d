"""Watching packet reordering with a sliding-window edit distance.

Sequence numbers arrive mostly in order, with a fraction of packets overtaken
in flight.  The edit distance to monotonicity of the last ``w`` sequence
numbers counts how many packets would have to be dropped to make the window
sorted, a reasonable "how reordered is the link right now" number.

Run:  python3 demos/01_reordering_monitor.py
"""

import numpy as np

from edwindow import EdEstimator, exact_ed
from edwindow.cli import generate

w, eps = 1024, 0.5

# a quiet link, then a bad patch, then quiet again
calm = generate("reorder", 4000, seed=1, reorder_p=0.02, reorder_d=3)
rough = generate("reorder", 4000, seed=2, reorder_p=0.4, reorder_d=30)
seq = calm + [x + 4000 for x in rough] + [x + 8000 for x in calm]

est = EdEstimator(w, eps)
rows = []
for i, s in enumerate(seq, 1):
    est.push(s)
    if i % 500 == 0:
        e = est.query()
        truth = exact_ed(seq[max(0, i - w) : i])
        rows.append((i, truth, e.value, e.lower_bound_claim))

print(f"{'i':>6} {'exact':>6} {'estimate':>9} {'ed >=':>7}")
for i, truth, val, lb in rows:
    print(f"{i:6d} {truth:6d} {val:9.1f} {lb:7.1f}")

# the estimate never undershoots and never exceeds (4 + eps) times the truth
ok = all(t <= v <= (4 + eps) * t for _, t, v, _ in rows)
print("within guarantee:", ok)
print("retained entries:", est.retained_entries(), "for a window of", w)
