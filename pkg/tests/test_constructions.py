from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropcount.constructions import (
    dual_curve, glue, inversion, local_hexagon_solutions, partially_inverted_curves,
    preimage_by_construction, totally_inverted_curve,
)
from tropcount.crossratio import CrossRatio, fulfills_all, multiplicity
from tropcount.degree import brute_force_degree, compute_degree, generic_lengths
from tropcount.errors import InvalidInput, NonGeneric
from tropcount.trees import MarkedTree, enumerate_trivalent_trees, forgetful
from tropcount.triangulation import Triangulation, derive_crossratios, enumerate_triangulations

STAR = Triangulation(6, [(2, 4), (4, 6), (2, 6)], [2, 3, 4])
OCTAGON = Triangulation(8, [(2, 8), (2, 4), (4, 6), (6, 8), (4, 8)])
FAN = Triangulation(6, [(1, 3), (1, 4), (1, 5)])


def _cherries(tree: MarkedTree) -> set[frozenset]:
    out = set()
    for s in tree.splits:
        side = frozenset(s.part)
        out |= {p for p in (side, tree.label_set - side) if len(p) == 2}
    return out


def test_dual_curve_of_star_hexagon():
    tree = dual_curve(STAR)
    assert _cherries(tree) == {frozenset({1, 2}), frozenset({3, 4}), frozenset({5, 6})}
    assert forgetful(tree, {1, 2, 3, 4}).splits[0].part == (3, 4)
    assert fulfills_all(tree, derive_crossratios(STAR, "dual"))


def test_totally_inverted_curve_of_star_hexagon():
    assert inversion(STAR)[3] == 2
    tree = totally_inverted_curve(STAR)
    assert _cherries(tree) == {frozenset({2, 5}), frozenset({1, 4}), frozenset({3, 6})}
    assert fulfills_all(tree, derive_crossratios(STAR, "dual"))


def test_square_has_a_single_curve():
    sq = Triangulation(4, [(1, 3)], [5])
    (curve,) = compute_degree(derive_crossratios(sq, "dual")).curves
    assert curve.tree == dual_curve(sq)
    assert len(partially_inverted_curves(sq)) == 1
    inverted = totally_inverted_curve(sq)
    # Swapping at both ends of the one diagonal turns {2,3} into {1,4}: the same split.
    assert inverted == dual_curve(sq)
    assert fulfills_all(inverted, derive_crossratios(sq, "dual"))


def test_inversion_needs_no_outer_triangles():
    with pytest.raises(InvalidInput):
        totally_inverted_curve(FAN)


def test_partially_inverted_octagon():
    t = OCTAGON.with_lengths([3, 5, 7, 11, 13])
    found = partially_inverted_curves(t)
    assert len(found) == 4
    trees = [tree for _, tree in found]
    assert len(set(trees)) == 4
    crs = derive_crossratios(t, "dual")
    assert all(multiplicity(tree, crs) == 1 for tree in trees)
    oracle = brute_force_degree(crs)
    assert sorted(c.tree for c in oracle.curves) == sorted(trees)
    by_kind = {frozenset(o.to_json().values()): tree for o, tree in found}
    assert by_kind[frozenset({"dual"})] == dual_curve(t)
    assert by_kind[frozenset({"inverted"})] == totally_inverted_curve(t)


def test_local_hexagon_solutions():
    c = [CrossRatio((1, 6), (2, 3), 1), CrossRatio((2, 3), (4, 5), 1), CrossRatio((1, 6), (4, 5), 1)]
    (one,) = local_hexagon_solutions(*c)
    assert one.multiplicity == 2
    with pytest.raises(InvalidInput):
        local_hexagon_solutions(c[0], c[1], CrossRatio((1, 6), (2, 7), 1))


# -- gluing ------------------------------------------------------------------
@given(st.integers(6, 9), st.integers(0, 10 ** 9), st.data())
@settings(max_examples=80, deadline=None)
def test_glue_recovers_a_curve_from_two_restrictions(n, pick, data):
    trees = enumerate_trivalent_trees(range(1, n + 1)) if n <= 7 else None
    rng = random.Random(pick)
    if trees is None:
        from tropcount.trees import tree_from_rank, count_trivalent_trees
        tree = tree_from_rank(range(1, n + 1), rng.randrange(count_trivalent_trees(n)))
    else:
        tree = trees[pick % len(trees)]
    tree = tree.with_lengths(generic_lengths(tree.splits, pick))
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    k = data.draw(st.integers(3, n - 2))
    shared = set(labels[:k])
    rest = labels[k:]
    cut = data.draw(st.integers(1, len(rest) - 1))
    x, y = shared | set(rest[:cut]), shared | set(rest[cut:])
    try:
        glued = glue(forgetful(tree, x), forgetful(tree, y), shared)
    except NonGeneric:
        return
    # Gluing is only unique when the pieces see every bounded edge; it must
    # at least restrict correctly.
    assert forgetful(glued, x) == forgetful(tree, x)
    assert forgetful(glued, y) == forgetful(tree, y)


def test_glue_of_fan_pieces():
    t = FAN.with_lengths([2, 3, 5])
    crs = derive_crossratios(t, "neighboring")
    (expected,) = compute_degree(crs).curves
    built = preimage_by_construction(t, "neighboring")
    assert [c.tree for c in built.curves] == [expected.tree]


def test_glue_checks():
    a = MarkedTree([1, 2, 3, 4], [{1, 2}], [1])
    b = MarkedTree([1, 2, 3, 5], [{1, 3}], [1])
    with pytest.raises(InvalidInput):
        glue(a, b, {1, 2})
    with pytest.raises(InvalidInput):
        glue(a, a, {1, 2, 3})
    c = MarkedTree([1, 2, 3, 4, 5], [{1, 2}, {1, 2, 3}], [1, 1])
    d = MarkedTree([1, 2, 3, 4, 6], [{1, 3}, {1, 3, 2}], [1, 1])
    with pytest.raises(InvalidInput, match="disagree"):
        glue(c, d, {1, 2, 3, 4})
    assert glue(a, b, {1, 2, 3}).label_set == frozenset(range(1, 6))


# -- full construction -------------------------------------------------------
def test_star_hexagon_neighboring():
    r = preimage_by_construction(STAR, "neighboring", [1, 1, 1])
    assert (r.d, r.k, len(r), r.degree) == (1, 1, 1, 2)
    assert r.curves[0].multiplicity == 2
    r = preimage_by_construction(STAR, "neighboring", [7, 2, 3])
    assert (r.k, len(r), r.degree) == (0, 2, 2)


def test_octagon_dual_example():
    r = preimage_by_construction(OCTAGON, "dual", [3, 5, 7, 11, 13])
    assert (len(r), r.degree) == (4, 4)
    assert {c.multiplicity for c in r.curves} == {1}


def test_fan_has_degree_one():
    for interp in ("dual", "neighboring", "intersecting"):
        r = preimage_by_construction(FAN.with_lengths([2, 3, 5]), interp)
        assert (r.d, len(r), r.degree) == (0, 1, 1)


@pytest.mark.parametrize("n", [6, 7])
def test_construction_equals_search_everywhere(n):
    rng = random.Random(n)
    for t in enumerate_triangulations(n):
        t = t.with_lengths(generic_lengths(t.diagonals, rng.randrange(10 ** 6)))
        names = [rng.choice(("dual", "neighboring", "intersecting")) for _ in t.diagonals]
        built = preimage_by_construction(t, names)
        found = compute_degree(derive_crossratios(t, names))
        assert built.multiset == found.multiset
        assert built.degree == 2 ** t.d
        assert len(built) == built.expected_count
        assert {c.multiplicity for c in built.curves} == {built.expected_multiplicity}


def test_result_json():
    out = preimage_by_construction(STAR, "neighboring", [1, 1, 1]).to_json()
    assert (out["d"], out["k"], out["expected_count"], out["expected_multiplicity"], out["degree"]) == (1, 1, 1, 2, 2)


# Number of distinct local outcomes for each interpretation triple of an inner
# triangle (shared side first, the other two unordered), as the three lengths
# range over all generic values.  "Any order" rows have a single outcome.
CASE_ROWS = {
    "ddd": 1, "ddn": 1, "ddi": 3, "dnn": 2, "dni": 1, "dii": 1,
    "ndd": 1, "ndn": 2, "ndi": 1, "nnn": 4, "nni": 2, "nii": 1,
    "idd": 3, "idn": 1, "idi": 1, "inn": 2, "ini": 1, "iii": 3,
}


@pytest.mark.parametrize("shared_side", [0, 1, 2])
def test_local_outcomes_per_interpretation_triple(shared_side):
    import itertools
    full = {"d": "dual", "n": "neighboring", "i": "intersecting"}
    star = Triangulation(6, [(2, 4), (4, 6), (2, 6)])
    others = [p for p in range(3) if p != shared_side]
    for key, rows in CASE_ROWS.items():
        names = [None] * 3
        names[shared_side], names[others[0]], names[others[1]] = (full[c] for c in key)
        outcomes = set()
        for lengths in itertools.permutations(range(1, 8), 3):
            try:
                r = compute_degree(derive_crossratios(star.with_lengths(lengths), names))
            except NonGeneric:
                continue
            outcomes.add(frozenset(c.tree.key for c in r.curves))
        assert len(outcomes) == rows, key
