"""Brute-force references shared by the test modules."""

import math

import numpy as np

from edwindow.oracle import exact_ed


def rank_ok(suffix, answer, phi, eps):
    """True if ``answer`` is an eps-approximate phi-quantile of ``suffix``.

    With duplicates a value occupies a run of ranks; any of them may count.
    The tolerance interval is widened to the nearest whole ranks and clamped.
    """
    s = np.asarray(suffix)
    n = len(s)
    below = int(np.count_nonzero(s < answer))
    upto = int(np.count_nonzero(s <= answer))
    if upto == below:
        return False  # not an element of the suffix
    lo = max(1, math.floor((phi - eps) * n + 1e-9))
    hi = min(n, max(1, math.ceil((phi + eps) * n - 1e-9)))
    return below + 1 <= hi and upto >= lo


def algorithm_exact(values, w, phi):
    """Token timestamps produced by probing every suffix length with exact quantiles."""
    tokens = []
    for i in range(1, len(values) + 1):
        v = values[i - 1]
        for ell in range(1, min(w - 1, i - 1) + 1):
            suffix = sorted(values[i - 1 - ell : i - 1])
            r = min(ell, max(1, math.ceil(phi * ell - 1e-9)))
            if suffix[r - 1] > v:
                tokens.append((i, i - ell))
                break
    return tokens


def window_eds(values, w, every=1):
    """``(i, exact ed of the window ending at i)`` for every ``every``-th i."""
    out = []
    for i in range(every, len(values) + 1, every):
        out.append((i, exact_ed(values[max(0, i - w) : i])))
    return out
