"""Cross-ratio degrees and the full preimage of a point under the cross-ratio map.

The degree is a sum over trivalent combinatorial types: a type contributes
``|det M|`` when the multiplicity matrix ``M`` is invertible and the unique
solution of ``M l = lambda`` is strictly positive.

:func:`compute_degree` walks the types by inserting labels one at a time and
cuts every partial tree that already fails a four-point condition: a positive
cross-ratio length forces the quartet topology ``ab|cd`` and quartet
topologies survive forgetting ends, so such a branch cannot contain a
solution.  :func:`brute_force_degree` is the plain sweep over all
``(2n-5)!!`` types and serves as the reference.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from tropcount.crossratio import CrossRatioSet, fulfills_all, multiplicity_matrix
from tropcount.errors import GenericityFailure, InvalidInput, NonGeneric
from tropcount.exactmath import det_solve, format_rational
from tropcount.parallel import pmap
from tropcount.trees import MarkedTree, Split, enumerate_trivalent_trees, serialize

MAX_RESAMPLES = 64


@dataclass(frozen=True)
class PreimageCurve:
    tree: MarkedTree
    multiplicity: int

    def to_json(self) -> dict:
        return {
            "tree": serialize(self.tree.topology()),
            "lengths": {str(s): format_rational(v)
                        for s, v in zip(self.tree.splits, self.tree.length_vector)},
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    curves: tuple[PreimageCurve, ...] = ()
    lengths_used: tuple[Fraction, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "lengths": [format_rational(v) for v in self.lengths_used],
            "curves": [c.to_json() for c in self.curves],
        }

    @property
    def multiset(self) -> list[tuple]:
        """Curves as sortable ``(key, lengths, multiplicity)`` triples."""
        return sorted((c.tree.key, c.tree.length_vector, c.multiplicity) for c in self.curves)


def _validate(crs: CrossRatioSet):
    if not isinstance(crs, CrossRatioSet):
        raise InvalidInput("expected a CrossRatioSet")
    if crs.n < 4:
        raise InvalidInput("the degree needs n >= 4")
    if not crs.is_square:
        raise InvalidInput(f"need exactly n-3 = {crs.n - 3} cross-ratios, got {len(crs)}")
    if any(cr.length <= 0 for cr in crs):
        raise InvalidInput("all cross-ratio lengths must be positive")


def _finish(crs: CrossRatioSet, curves: Iterable[PreimageCurve]) -> DegreeResult:
    ordered = tuple(sorted(curves, key=lambda c: c.tree.sort_key()))
    if len({c.tree.key for c in ordered}) != len(ordered):
        raise AssertionError("two preimage curves share a combinatorial type")
    return DegreeResult(sum(c.multiplicity for c in ordered), ordered, crs.lengths)


def _evaluate(labels: Sequence[int], splits: Sequence[Split], rows, lengths) -> PreimageCurve | None:
    """Solve one cone; ``rows`` is the multiplicity matrix."""
    det, sol = det_solve(rows, lengths)
    if det == 0:
        return None
    if any(v < 0 for v in sol):
        return None
    if any(v == 0 for v in sol):
        raise NonGeneric("a preimage lies on the boundary of a cone")
    return PreimageCurve(MarkedTree(labels, splits, sol, check=False), abs(det))


def brute_force_degree(crs: CrossRatioSet) -> DegreeResult:
    """Reference sweep over every trivalent type, straight from the definition."""
    _validate(crs)
    curves = []
    for tree in enumerate_trivalent_trees(crs.labels):
        m = multiplicity_matrix(tree, crs)
        found = _evaluate(tree.labels, tree.splits, m.entries, crs.lengths)
        if found is not None:
            curves.append(found)
    return _finish(crs, curves)


# -- pruned search ---------------------------------------------------------
class _Plan(NamedTuple):
    labels: tuple[int, ...]
    order: tuple[int, ...]                  # bit indices in insertion order
    checks: tuple[tuple[tuple[int, int, int], ...], ...]   # per insertion step: (abcd, ab, cd)
    rows: tuple[tuple[int, int, int], ...]  # every condition as (abcd, ab, cd)
    lengths: tuple[Fraction, ...]


def _insertion_order(n: int, sets: list[int]) -> list[int]:
    chosen: list[int] = []
    mask = 0
    remaining = set(range(n))
    while remaining:
        def score(i):
            m = mask | (1 << i)
            done = sum(1 for s in sets if s & m == s and s & mask != s)
            touch = sum(bin(s & m).count("1") ** 2 for s in sets if s & mask != s)
            return (done, touch, -i)
        best = max(remaining, key=score)
        chosen.append(best)
        mask |= 1 << best
        remaining.discard(best)
    return chosen


def _plan(crs: CrossRatioSet) -> _Plan:
    labels = crs.labels
    pos = {x: i for i, x in enumerate(labels)}

    def bits(xs):
        m = 0
        for x in xs:
            m |= 1 << pos[x]
        return m

    rows = tuple((bits(cr.markings), bits(cr.first), bits(cr.second)) for cr in crs)
    order = _insertion_order(len(labels), [r[0] for r in rows])
    checks = []
    mask = 0
    for i in order:
        prev = mask
        mask |= 1 << i
        checks.append(tuple(r for r in rows if r[0] & mask == r[0] and r[0] & prev != r[0]))
    return _Plan(labels, tuple(order), tuple(checks), rows, crs.lengths)


def _quartets_ok(clusters: list[int], checks) -> bool:
    for abcd, ab, cd in checks:
        for c in clusters:
            x = c & abcd
            if x == ab or x == cd:
                break
        else:
            return False
    return True


def _initial(plan: _Plan) -> list[int] | None:
    o = plan.order
    a, b = 1 << o[1], 1 << o[2]
    clusters = [a, b, a | b]
    for step in range(3):
        if not _quartets_ok(clusters, plan.checks[step]):
            return None
    return clusters


def _children(plan: _Plan, clusters: list[int], step: int) -> list[list[int]]:
    x = 1 << plan.order[step]
    checks = plan.checks[step]
    out = []
    for at in clusters:
        new = []
        for c in clusters:
            if c == at:
                new.append(c)
                new.append(c | x)
            elif c & at == at:
                new.append(c | x)
            else:
                new.append(c)
        new.append(x)
        if not checks or _quartets_ok(new, checks):
            out.append(new)
    return out


def _leaf(plan: _Plan, clusters: list[int]) -> PreimageCurve | None:
    n = len(plan.labels)
    full = (1 << n) - 1
    bounded = [c for c in clusters if 1 < bin(c).count("1") < n - 1]
    rows = []
    for abcd, ab, cd in plan.rows:
        row = []
        for c in bounded:
            x = c & abcd
            row.append(1 if (x == ab or x == cd) else 0)
        rows.append(row)
    det, sol = det_solve(rows, plan.lengths)
    if det == 0 or any(v < 0 for v in sol):
        return None
    if any(v == 0 for v in sol):
        raise NonGeneric("a preimage lies on the boundary of a cone")
    labels = plan.labels
    splits = []
    for c in bounded:
        if c & 1:
            c = full ^ c
        splits.append(Split(tuple(labels[i] for i in range(n) if c >> i & 1)))
    return PreimageCurve(MarkedTree(labels, splits, sol, check=False), abs(det))


def _search(plan: _Plan, clusters: list[int], step: int) -> list[PreimageCurve]:
    n = len(plan.labels)
    found = []
    stack = [(clusters, step)]
    while stack:
        cl, st = stack.pop()
        if st == n:
            curve = _leaf(plan, cl)
            if curve is not None:
                found.append(curve)
            continue
        for child in _children(plan, cl, st):
            stack.append((child, st + 1))
    return found


def _search_task(args) -> list[PreimageCurve]:
    plan, clusters, step = args
    return _search(plan, clusters, step)


def _frontier(plan: _Plan, want: int) -> list[tuple[list[int], int]]:
    start = _initial(plan)
    if start is None:
        return []
    level, step = [start], 3
    n = len(plan.labels)
    while step < n and len(level) < want:
        level = [c for cl in level for c in _children(plan, cl, step)]
        step += 1
    return [(cl, step) for cl in level]


def compute_degree(crs: CrossRatioSet, *, jobs: int = 1) -> DegreeResult:
    """Degree and every preimage curve for generic positive lengths.

    Raises :class:`NonGeneric` when some solution sits on a cone boundary.
    ``jobs > 1`` spreads subtrees of the search over worker processes; the
    result is identical for every value.
    """
    _validate(crs)
    n = crs.n
    used = 0
    for s in crs.marking_sets:
        for x in s:
            used |= 1 << crs.labels.index(x)
    if used != (1 << n) - 1:
        # An unused end makes the columns of its two neighbouring edges equal,
        # so no cone is injective.
        return _finish(crs, ())
    plan = _plan(crs)
    if jobs <= 1:
        start = _initial(plan)
        curves = [] if start is None else _search(plan, start, 3)
        return _finish(crs, curves)
    tasks = [(plan, cl, st) for cl, st in _frontier(plan, 8 * jobs)]
    parts = pmap(_search_task, tasks, jobs=jobs)
    return _finish(crs, [c for part in parts for c in part])


# -- lengths in general position ---------------------------------------------
def generic_lengths(marking_sets: Sequence, seed: int = 0) -> list[Fraction]:
    """Distinct pseudo-random positive integer lengths in ``[1, 2**32]``."""
    rng = random.Random(seed)
    out: list[int] = []
    seen = set()
    while len(out) < len(marking_sets):
        v = rng.randint(1, 2 ** 32)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return [Fraction(v) for v in out]


def generic_degree(crs: CrossRatioSet, seed: int = 0, *, jobs: int = 1) -> DegreeResult:
    """Draw generic lengths (ignoring the ones in ``crs``) and compute the degree.

    Retries with the next seed on a boundary solution, at most 64 times.
    """
    for attempt in range(MAX_RESAMPLES):
        lengths = generic_lengths(crs.marking_sets, seed + attempt)
        try:
            return compute_degree(crs.with_lengths(lengths), jobs=jobs)
        except NonGeneric:
            continue
    raise GenericityFailure(f"{MAX_RESAMPLES} consecutive non-generic length draws")


def degree_of_sets(sets: Iterable[Iterable[int]], n: int, seed: int = 0) -> int:
    """Degree of the marking sets ``U`` with the sorted default pairing."""
    crs = CrossRatioSet.from_marking_sets(sets, n=n)
    return generic_degree(crs, seed).degree


def verify_curves(result: DegreeResult, crs: CrossRatioSet) -> bool:
    """Re-check every returned curve against every condition."""
    return all(fulfills_all(c.tree, crs) and min(c.tree.length_vector, default=1) > 0
               for c in result.curves)


# -- product formula -------------------------------------------------------
class PartitionSplit(NamedTuple):
    shared: tuple[int, int, int]
    X: frozenset
    Y: frozenset
    crs_X: CrossRatioSet
    crs_Y: CrossRatioSet


def partition_split(crs: CrossRatioSet) -> PartitionSplit | None:
    """Find ``[n] = {i1,i2,i3} + X + Y`` with every condition inside one side.

    Candidates for ``{i1,i2,i3}`` are scanned lexicographically; ``X`` is the
    block of the remaining markings containing the smallest one, where two
    markings share a block when some condition uses both.  Sub-problems keep
    the original markings, on label sets ``{i1,i2,i3} | X`` and
    ``{i1,i2,i3} | Y``.
    """
    labels = crs.labels
    for shared in combinations(labels, 3):
        sh = set(shared)
        rest = [x for x in labels if x not in sh]
        parent = {x: x for x in rest}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s in crs.marking_sets:
            outside = sorted(s - sh)
            for y in outside[1:]:
                parent[find(y)] = find(outside[0])
        root = find(rest[0])
        X = frozenset(x for x in rest if find(x) == root)
        Y = frozenset(rest) - X
        if not Y:
            continue
        in_x = [cr for cr in crs if cr.markings <= sh | X]
        in_y = [cr for cr in crs if cr.markings <= sh | Y]
        return PartitionSplit(
            shared, X, Y,
            CrossRatioSet(in_x, labels=sh | X, square=False),
            CrossRatioSet(in_y, labels=sh | Y, square=False),
        )
    return None


def degree_via_product(crs: CrossRatioSet, split: PartitionSplit | None = None) -> int:
    """``d_U = d_{U_X} d_{U_Y}`` when ``|U_X| = |X|``, else 0."""
    if split is None:
        split = partition_split(crs)
    if split is None:
        raise InvalidInput("no partition into two sides sharing three markings exists")
    if len(split.crs_X) != len(split.X):
        return 0
    return compute_degree(split.crs_X).degree * compute_degree(split.crs_Y).degree
