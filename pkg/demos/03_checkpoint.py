"""Saving an estimator mid-stream and resuming it elsewhere.

Run:  python3 demos/03_checkpoint.py
"""

import numpy as np

from edwindow import EdEstimator

rng = np.random.default_rng(5)
vals = rng.integers(1, 1000, size=6000).tolist()

a = EdEstimator(2048, 0.25)
a.extend(vals[:3000])
blob = a.to_bytes()
print("checkpoint size:", len(blob), "bytes")

b = EdEstimator.from_bytes(blob)
a.extend(vals[3000:])
b.extend(vals[3000:])
print("original:", a.query().value)
print("resumed: ", b.query().value)
assert a.query() == b.query()
