from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropcount.errors import InvalidInput
from tropcount.trees import (
    MarkedTree, Split, compatible, count_trivalent_trees, edge_split, enumerate_trivalent_trees,
    forgetful, from_clusters, iter_trivalent_trees, parse, serialize, star, tree_from_rank,
)


def count_by_recursion(n: int) -> int:
    """A new leaf can go on any of the 2n-5 edges of an (n-1)-leaf tree."""
    return 1 if n == 3 else count_by_recursion(n - 1) * (2 * (n - 1) - 3)


@pytest.mark.parametrize("n", range(3, 9))
def test_enumeration_counts(n):
    trees = enumerate_trivalent_trees(range(1, n + 1))
    assert len(trees) == count_by_recursion(n) == count_trivalent_trees(n)
    assert len({t.key for t in trees}) == len(trees)
    assert all(t.is_trivalent for t in trees)


def test_known_counts():
    assert [count_trivalent_trees(n) for n in range(4, 9)] == [3, 15, 105, 945, 10395]


def test_rank_order_is_restartable():
    labels = range(1, 7)
    full = list(iter_trivalent_trees(labels))
    assert list(iter_trivalent_trees(labels, start=40)) == full[40:]
    assert tree_from_rank(labels, 17) == full[17]


def test_labels_need_not_be_consecutive():
    trees = enumerate_trivalent_trees([2, 5, 9, 11, 40])
    assert len(trees) == 15
    assert all(t.labels == (2, 5, 9, 11, 40) for t in trees)


def test_split_canonical_form():
    labels = range(1, 7)
    assert Split.of({1, 2, 3}, labels) == Split.of({4, 5, 6}, labels) == Split((4, 5, 6))
    s = Split.of({3, 4}, labels)
    assert s.separates((3, 4), (1, 6))
    assert not s.separates((3, 5), (1, 4))


def test_tree_validation():
    with pytest.raises(InvalidInput):
        MarkedTree(range(1, 6), [Split((1, 2))])   # canonical side must avoid the smallest label
    with pytest.raises(InvalidInput):
        MarkedTree(range(1, 7), [{2, 3}, {3, 4}])  # incompatible
    with pytest.raises(InvalidInput):
        MarkedTree(range(1, 6), [{2, 3}], [0])     # length must be positive
    with pytest.raises(InvalidInput):
        MarkedTree([1, 2])


def test_edge_split():
    t = MarkedTree(range(1, 7), [{1, 2}, {3, 4}, {5, 6}])
    assert edge_split(t, {3, 4}) == Split((3, 4))
    assert edge_split(t, {1, 2, 5, 6}) == Split((3, 4))
    with pytest.raises(InvalidInput):
        edge_split(t, {3})
    with pytest.raises(InvalidInput):
        edge_split(t, {2, 3})


def test_serialize_round_trip():
    t = MarkedTree(range(1, 7), [{3, 4}, {5, 6}, {3, 4, 5, 6}], [Fraction(1, 2), 3, 7])
    text = serialize(t)
    assert text == "{1,2,3,4,5,6}[3,4;3,4,5,6;5,6]lengths{3,4=1/2;3,4,5,6=7;5,6=3}"
    assert parse(text) == t
    bare = t.topology()
    assert parse(serialize(bare)) == bare
    with pytest.raises(InvalidInput):
        parse("{1,2,3}[")


def test_forgetful_sums_merged_edges():
    # snowflake with cherries {1,2}, {3,4}, {5,6}; forget 4 and 6
    t = MarkedTree(range(1, 7), [{1, 2}, {3, 4}, {5, 6}], {Split((3, 4, 5, 6)): 2, Split((3, 4)): 3, Split((5, 6)): 5})
    f = forgetful(t, {1, 2, 3, 5})
    assert f.labels == (1, 2, 3, 5)
    assert f.lengths == {Split((3, 5)): 2}
    assert forgetful(t, {1, 3, 5}) == star({1, 3, 5})
    # caterpillar: forgetting an interior end merges its two neighbouring edges
    cat = MarkedTree(range(1, 7), [{3, 4, 5, 6}, {4, 5, 6}, {5, 6}],
                     {Split((3, 4, 5, 6)): 1, Split((4, 5, 6)): 2, Split((5, 6)): 4})
    assert forgetful(cat, {1, 2, 3, 5, 6}).lengths == {Split((5, 6)): 6, Split((3, 5, 6)): 1}


@st.composite
def metric_trees(draw, max_n=9):
    n = draw(st.integers(4, max_n))
    rank = draw(st.integers(0, count_trivalent_trees(n) - 1))
    t = tree_from_rank(range(1, n + 1), rank)
    lengths = draw(st.lists(st.integers(1, 50), min_size=n - 3, max_size=n - 3))
    return t.with_lengths(lengths)


@given(metric_trees(), st.randoms(use_true_random=False))
@settings(max_examples=150)
def test_forgetful_composes(t, rnd):
    keep = sorted(rnd.sample(t.labels, rnd.randint(4, t.n)))
    smaller = sorted(rnd.sample(keep, rnd.randint(3, len(keep))))
    assert forgetful(forgetful(t, keep), smaller) == forgetful(t, smaller)
    assert forgetful(t, t.labels) == t


@given(metric_trees())
@settings(max_examples=100)
def test_clusters_rebuild_tree(t):
    assert from_clusters(t.labels, t.clusters) == t
    sets = [frozenset(s.part) for s in t.splits]
    assert all(compatible(a, b, t.label_set) for a in sets for b in sets)


def test_distance_sum_check_against_random_metric():
    # Paths a->c and b->d share exactly the edges separating {a,b} from {c,d}.
    rng = random.Random(3)
    t = tree_from_rank(range(1, 8), 500).with_lengths([rng.randint(1, 9) for _ in range(4)])
    for s in t.splits:
        inside, outside = list(s.part), [x for x in t.labels if x not in s.part]
        assert s.separates(inside[:2], outside[:2])
