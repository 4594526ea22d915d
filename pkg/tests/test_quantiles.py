import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edwindow import QuantileSummary, QueryError
from edwindow.quantiles import rank_window, target_rank

from _oracles import rank_ok


def fill(q, values):
    for v in values:
        q.insert(int(v))
    return q


def test_max_of_window():
    q = fill(QuantileSummary(8, 0.1), [1, 2, 3])
    assert q.query(3, 1.0) == 3


def test_singleton():
    q = fill(QuantileSummary(8, 0.1), [5])
    assert q.query(1, 0.5) == 5


def test_expired_value_unreachable():
    w = 50
    q = fill(QuantileSummary(w, 0.1), range(1, w + 2))
    a = q.query(w, 0.0)
    assert a != 1
    assert 2 <= a <= 2 + max(1, int(0.1 * w))


def test_median_of_permutation():
    rng = np.random.default_rng(0)
    q = fill(QuantileSummary(200, 0.05), rng.permutation(100) + 1)
    assert 45 <= q.query(100, 0.5) <= 55


def test_constant_window():
    q = fill(QuantileSummary(20, 0.05), [7] * 10)
    for phi in (0.0, 0.3, 1.0):
        assert q.query(10, phi) == 7


@pytest.mark.parametrize("w_prime, phi", [(0, 0.5), (11, 0.5), (3, -0.1), (3, 1.5)])
def test_query_errors(w_prime, phi):
    q = fill(QuantileSummary(20, 0.05), range(1, 11))
    with pytest.raises(QueryError):
        q.query(w_prime, phi)


def test_constructor_errors():
    with pytest.raises(ValueError):
        QuantileSummary(0, 0.1)
    with pytest.raises(ValueError):
        QuantileSummary(10, 0.0)
    with pytest.raises(ValueError):
        QuantileSummary(10, 0.1, exact_span=5)


def test_rank_helpers():
    assert target_rank(0.5, 3) == 2
    assert target_rank(0.0, 5) == 1
    assert target_rank(1.0, 5) == 5
    assert rank_window(0.5, 0.1, 3) == (1, 2)
    assert rank_window(0.5, 0.05, 100) == (45, 55)


def test_seeded_random_suffixes():
    rng = np.random.default_rng(7)
    vals = rng.integers(1, 1000, size=10_000)
    q = fill(QuantileSummary(4096, 0.05), vals)
    for _ in range(100):
        wp = int(rng.integers(1, 4097))
        phi = float(rng.random())
        assert rank_ok(vals[-wp:], q.query(wp, phi), phi, 0.05)


@pytest.mark.parametrize("w, eps, span", [(2048, 0.2, 20), (1500, 0.1, 40), (None, 0.25, 16)])
def test_compressed_path(w, eps, span):
    rng = np.random.default_rng(11)
    q = QuantileSummary(w, eps, exact_span=span)
    vals = rng.integers(1, 60, size=6000)
    limit = 6000 if w is None else w
    for t, v in enumerate(vals, 1):
        q.insert(int(v))
        if t % 250 == 0:
            assert q._blocks, "expected sealed blocks"
            for _ in range(20):
                wp = int(rng.integers(1, min(t, limit) + 1))
                phi = float(rng.random())
                assert rank_ok(vals[t - wp : t], q.query(wp, phi), phi, eps)


def test_compression_retains_fewer_entries():
    q = QuantileSummary(50_000, 0.2, exact_span=20)
    fill(q, np.random.default_rng(2).integers(1, 10**6, size=50_000))
    assert q.retained_entries() < 50_000 / 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=120), st.integers(2, 40), st.sampled_from([0.05, 0.2, 0.5]))
def test_every_query_small_windows(values, w, eps):
    q = fill(QuantileSummary(w, eps), values)
    n = min(w, len(values))
    for wp in range(1, n + 1):
        for phi in (0.0, 0.1, 0.25, 0.49, 0.5, 0.75, 1.0):
            assert rank_ok(values[-wp:], q.query(wp, phi), phi, eps)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=400), st.integers(1, 30), st.data())
def test_first_exceeding_matches_queries(values, v, data):
    q = QuantileSummary(300, 0.2, exact_span=20)
    fill(q, values)
    n = min(300, len(values))
    lengths = sorted(set(data.draw(st.lists(st.integers(1, n), min_size=1, max_size=30))))
    phi = 0.5 - 0.2
    expect = next((p for p, ell in enumerate(lengths) if q.query(ell, phi) > v), None)
    assert q.first_exceeding(v, lengths, phi) == expect


def test_deterministic():
    vals = np.random.default_rng(5).integers(1, 100, size=3000)
    a = fill(QuantileSummary(1000, 0.2, exact_span=20), vals)
    b = fill(QuantileSummary(1000, 0.2, exact_span=20), vals)
    assert [a.query(k, 0.4) for k in range(1, 1001, 37)] == [b.query(k, 0.4) for k in range(1, 1001, 37)]


def test_window_only_after_fill():
    q = fill(QuantileSummary(10, 0.1), [3, 4])
    with pytest.raises(QueryError):
        q.query(3, 0.5)
