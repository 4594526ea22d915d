import itertools
import random

import pytest
from hypothesis import given, strategies as st

from edwindow.oracle import exact_R, exact_ed, exact_lis, inversions, majority_witness, pruning_bound


def brute_lis(values):
    """Longest non-decreasing subsequence by checking every subset."""
    n = len(values)
    for size in range(n, 0, -1):
        for idx in itertools.combinations(range(n), size):
            if all(values[a] <= values[b] for a, b in zip(idx, idx[1:])):
                return size
    return 0


@pytest.mark.parametrize("values, lis", [
    ([1, 2, 3, 4], 4),
    ([3, 1, 2, 4], 3),
    ([2, 2, 1, 2], 3),
    ([], 0),
    ([7], 1),
])
def test_lis_examples(values, lis):
    assert exact_lis(values) == lis


@pytest.mark.parametrize("values, ed", [
    ([1, 2, 3, 4], 0),
    ([4, 3, 2, 1], 3),
    ([3, 1, 2, 4], 1),
    ([5, 5, 5], 0),
])
def test_ed_examples(values, ed):
    assert exact_ed(values) == ed


def test_ed_matches_subset_search():
    rng = random.Random(3)
    for _ in range(300):
        vals = [rng.randint(1, 5) for _ in range(rng.randint(0, 9))]
        assert exact_lis(vals) == brute_lis(vals)


@given(st.lists(st.integers(1, 50), max_size=60))
def test_lis_plus_ed_is_n(vals):
    assert exact_lis(vals) + exact_ed(vals) == len(vals)
    assert exact_ed(sorted(vals)) == 0


def test_inversions():
    assert inversions([5, 1], 2) == {1}
    assert inversions([1, 2, 3], 3) == set()
    assert inversions([3, 3, 1, 3], 4) == set()


@pytest.mark.parametrize("values, R", [
    ([1, 2, 3], set()),
    ([5, 1], {2}),
    ([3, 2, 1], {2, 3}),
    ([1, 5, 2, 6, 3], {3, 5}),
])
def test_R_examples(values, R):
    assert exact_R(values) == R


@given(st.lists(st.integers(1, 6), max_size=30))
def test_R_agrees_with_witness(vals):
    R = exact_R(vals)
    assert R == {j for j in range(1, len(vals) + 1) if majority_witness(vals, j, 0.5)}


def test_pruning_examples():
    assert pruning_bound([1, 2, 3, 4], set()) == 0
    assert pruning_bound([5, 1], {2}) == 1
    with pytest.raises(ValueError):
        pruning_bound([1], set(), theta=0.7)


@given(st.lists(st.integers(1, 8), max_size=40))
def test_pruning_with_R(vals):
    R = exact_R(vals)
    deleted = pruning_bound(vals, R)
    assert deleted >= exact_ed(vals)
    # every deletion is charged to a member, at most two deletions per member
    assert len(R) >= deleted / 2


@given(st.lists(st.integers(1, 8), max_size=40), st.randoms())
def test_pruning_is_a_valid_deletion(vals, rnd):
    # whatever the member set, the walk deletes at least ed items
    members = {j for j in range(1, len(vals) + 1) if rnd.random() < 0.3}
    assert pruning_bound(vals, members) >= exact_ed(vals)
