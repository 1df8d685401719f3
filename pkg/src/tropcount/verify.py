"""Self-checks: every structural claim the package relies on, swept over many inputs.

Each ``*_sweep`` function returns a :class:`Check` with the number of cases
tried and a list of failure descriptions.  :func:`run_suite` strings them
together for the ``verify`` command.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Callable, Sequence

from tropcount.constructions import (
    dual_curve, glue, partially_inverted_curves, preimage_by_construction, totally_inverted_curve,
)
from tropcount.crossratio import CrossRatioSet, all_pairings, multiplicity
from tropcount.degree import (
    brute_force_degree, compute_degree, degree_via_product, generic_lengths, partition_split,
)
from tropcount.errors import GenericityFailure, NonGeneric
from tropcount.parallel import pmap
from tropcount.trees import count_trivalent_trees, double_factorial, enumerate_trivalent_trees
from tropcount.triangulation import (
    INTERPRETATIONS, OUTER, Triangulation, classify_triangles, derive_crossratios,
    enumerate_triangulations,
)

RESAMPLES = 64


@dataclass
class Check:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        self.failures.append(msg)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name}: {self.cases} cases, {self.seconds:.1f}s{extra}"


def _timed(check: Check, start: float) -> Check:
    check.seconds = time.perf_counter() - start
    return check


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def count_triangulations(n: int) -> int:
    """Recursive count, independent of the enumeration: fix the edge (1, n)."""
    table = [1, 1]
    for m in range(2, n - 1):
        table.append(sum(table[i] * table[m - 1 - i] for i in range(m)))
    return table[n - 2]


# -- enumeration counts --------------------------------------------------
def count_sweep(n_trees: Sequence[int], n_polygons: Sequence[int]) -> Check:
    start = time.perf_counter()
    check = Check("enumeration counts")
    for n in n_trees:
        check.cases += 1
        got = len(enumerate_trivalent_trees(range(1, n + 1)))
        if got != double_factorial(2 * n - 5) or got != count_trivalent_trees(n):
            check.fail(f"n={n}: {got} trivalent trees")
    for n in n_polygons:
        check.cases += 1
        got = enumerate_triangulations(n)
        if len(got) != catalan(n - 2) or len(got) != count_triangulations(n) or len({t.key for t in got}) != len(got):
            check.fail(f"n={n}: {len(got)} triangulations")
    return _timed(check, start)


# -- triangulation theorem ---------------------------------------------------
def _draw_seed(*parts) -> int:
    return random.Random(":".join(map(str, parts))).getrandbits(32)


def check_triangulation(t: Triangulation, interp) -> str | None:
    """Compare the search engine with the construction on one instance.

    Raises :class:`NonGeneric` so callers can redraw lengths.
    """
    crs = derive_crossratios(t, interp)
    found = compute_degree(crs)
    built = preimage_by_construction(t, interp)
    d, k = built.d, built.k
    problems = []
    if found.degree != 2 ** d:
        problems.append(f"degree {found.degree} != 2^{d}")
    if len(built) != 2 ** (d - k):
        problems.append(f"{len(built)} constructed curves != 2^{d - k}")
    if any(c.multiplicity != 2 ** k for c in built):
        problems.append(f"multiplicities {[c.multiplicity for c in built]} != 2^{k}")
    if found.multiset != built.multiset:
        problems.append("constructed curves differ from the searched ones")
    if problems:
        return f"{t} {interp} lengths={[str(v) for v in t.lengths]}: " + "; ".join(problems)
    return None


def _theorem_task(args) -> tuple[int, list[str]]:
    t, interps, seed, index = args
    cases, failures = 0, []
    for j, interp in enumerate(interps):
        for attempt in range(RESAMPLES):
            lengths = generic_lengths(t.diagonals, _draw_seed(seed, t, index, j, attempt))
            try:
                msg = check_triangulation(t.with_lengths(lengths), interp)
            except NonGeneric:
                continue
            break
        else:
            msg = f"{t} {interp}: no generic lengths in {RESAMPLES} draws"
        cases += 1
        if msg:
            failures.append(msg)
    return cases, failures


def theorem_sweep(n: int, *, draws: int = 2, mixed: int = 0, seed: int = 0, jobs: int = 1) -> Check:
    """Every triangulation of the ``n``-gon: uniform interpretations, ``draws``
    length draws each, plus ``mixed`` random per-diagonal interpretations."""
    start = time.perf_counter()
    check = Check(f"triangulation degree 2^d, n={n}")
    tasks = []
    for i, t in enumerate(enumerate_triangulations(n)):
        rng = random.Random(f"{seed}:mixed:{n}:{i}")
        interps: list = [name for name in INTERPRETATIONS for _ in range(draws)]
        interps += [tuple(rng.choice(INTERPRETATIONS) for _ in t.diagonals) for _ in range(mixed)]
        tasks.append((t, interps, seed, i))
    for cases, failures in pmap(_theorem_task, tasks, jobs=jobs, chunksize=4):
        check.cases += cases
        check.failures.extend(failures)
    return _timed(check, start)


# -- dual / inverted curves ----------------------------------------------
def no_outer_triangulations(n: int) -> list[Triangulation]:
    return [t for t in enumerate_triangulations(n)
            if not any(tc.kind == OUTER for tc in classify_triangles(t))]


def inverted_sweep(n_values: Sequence[int], seed: int = 0) -> Check:
    start = time.perf_counter()
    check = Check("partially inverted curves")
    for n in n_values:
        for i, t in enumerate(no_outer_triangulations(n)):
            for attempt in range(RESAMPLES):
                t = t.with_lengths(generic_lengths(t.diagonals, _draw_seed(seed, "inv", n, i, attempt)))
                try:
                    pieces = partially_inverted_curves(t)
                    reference = brute_force_degree(derive_crossratios(t, "dual"))
                except NonGeneric:
                    continue
                break
            check.cases += 1
            crs = derive_crossratios(t, "dual")
            trees = [tree for _, tree in pieces]
            d = t.d
            if len(trees) != 2 ** d or len(set(trees)) != len(trees):
                check.fail(f"{t}: {len(trees)} curves, {len(set(trees))} distinct, expected {2 ** d}")
            if any(multiplicity(tree, crs) != 1 for tree in trees):
                check.fail(f"{t}: a partially inverted curve has multiplicity != 1")
            if set(trees) != {c.tree for c in reference.curves} or reference.degree != 2 ** d:
                check.fail(f"{t}: partially inverted curves differ from the brute-force preimage")
            all_dual = [tree for o, tree in pieces if all(k == "dual" for _, k in o.choices)]
            all_inv = [tree for o, tree in pieces if all(k == "inverted" for _, k in o.choices)]
            if all_dual != [dual_curve(t)]:
                check.fail(f"{t}: all-dual orientation is not the dual curve")
            if d and all_inv != [totally_inverted_curve(t)]:
                check.fail(f"{t}: all-inverted orientation is not the totally inverted curve")
    return _timed(check, start)


# -- random marking sets ---------------------------------------------------
def random_sets(n: int, rng: random.Random) -> list[tuple[int, ...]]:
    return rng.sample(list(combinations(range(1, n + 1), 4)), n - 3)


def random_instance(n: int, rng: random.Random, *, nonzero: bool = False, tries: int = 500) -> CrossRatioSet:
    """Random sets, random pairings, generic lengths (optionally with nonzero degree)."""
    for _ in range(tries):
        sets = random_sets(n, rng)
        pairs = [rng.choice(all_pairings(s)) for s in sets]
        crs = CrossRatioSet.from_marking_sets(sets, n=n).with_pairings(pairs)
        crs = crs.with_lengths(generic_lengths(sets, rng.getrandbits(32)))
        if not nonzero:
            return crs
        try:
            if compute_degree(crs).degree:
                return crs
        except NonGeneric:
            continue
    raise GenericityFailure(f"no instance with nonzero degree found in {tries} draws")


def oracle_sweep(n: int, count: int, seed: int = 0) -> Check:
    """Pruned search against the plain sweep over all trivalent types."""
    start = time.perf_counter()
    check = Check(f"search engine vs full sweep, n={n}")
    rng = random.Random(f"{seed}:oracle:{n}")
    while check.cases < count:
        crs = random_instance(n, rng)
        try:
            a = compute_degree(crs)
            b = brute_force_degree(crs)
        except NonGeneric:
            continue
        check.cases += 1
        if a.multiset != b.multiset:
            check.fail(f"{crs}: search {a.degree}, sweep {b.degree}")
    return _timed(check, start)


def _degree_any_lengths(crs: CrossRatioSet, rng: random.Random) -> int:
    for _ in range(RESAMPLES):
        try:
            return compute_degree(crs.with_lengths(generic_lengths(crs.marking_sets, rng.getrandbits(32)))).degree
        except NonGeneric:
            continue
    raise GenericityFailure("no generic length draw")


def invariance_sweep(n: int, instances: int, *, draws: int = 5, pairing_samples: int | None = None,
                     seed: int = 0) -> Check:
    """Degree does not depend on lengths or on the pairing of each set.

    ``pairing_samples=None`` tries all ``3^(n-3)`` pairings.
    """
    start = time.perf_counter()
    check = Check(f"degree invariance, n={n}")
    rng = random.Random(f"{seed}:invariance:{n}")
    for _ in range(instances):
        crs = random_instance(n, rng, nonzero=True)
        check.cases += 1
        base = compute_degree(crs).degree
        seen = {_degree_any_lengths(crs, rng) for _ in range(draws)}
        if seen != {base}:
            check.fail(f"{crs}: degrees {sorted(seen)} over length draws, expected {base}")
            continue
        options = [all_pairings(s) for s in crs.marking_sets]
        if pairing_samples is None:
            choices = list(product(*options))
        else:
            choices = [tuple(rng.choice(o) for o in options) for _ in range(pairing_samples)]
        for pick in choices:
            d = _degree_any_lengths(crs.with_pairings(pick), rng)
            if d != base:
                check.fail(f"{crs}: pairing {pick} gives {d}, expected {base}")
                break
    return _timed(check, start)


# -- product formula -------------------------------------------------------
def random_decomposable(n: int, rng: random.Random) -> CrossRatioSet:
    """Sets split into two sides sharing three markings; sides may be unbalanced."""
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    shared, rest = labels[:3], labels[3:]
    cut = rng.randint(1, len(rest) - 1)
    xs, ys = rest[:cut], rest[cut:]
    room_x, room_y = comb(len(xs) + 3, 4), comb(len(ys) + 3, 4)
    if rng.random() < 0.7 and len(xs) <= room_x and n - 3 - len(xs) <= room_y:
        k = len(xs)
    else:
        k = rng.randint(max(0, n - 3 - room_y), min(n - 3, room_x))
    quads_x = list(combinations(sorted(shared + xs), 4))
    quads_y = list(combinations(sorted(shared + ys), 4))
    sets = rng.sample(quads_x, k) + rng.sample(quads_y, n - 3 - k)
    pairs = [rng.choice(all_pairings(s)) for s in sets]
    crs = CrossRatioSet.from_marking_sets(sets, n=n).with_pairings(pairs)
    return crs.with_lengths(generic_lengths(sets, rng.getrandbits(32)))


def check_product(crs: CrossRatioSet) -> str | None:
    split = partition_split(crs)
    if split is None:
        return f"{crs}: no partition found"
    full = compute_degree(crs)
    if degree_via_product(crs, split) != full.degree:
        return f"{crs}: product formula {degree_via_product(crs, split)} != {full.degree}"
    if len(split.crs_X) != len(split.X):
        return None
    cx, cy = compute_degree(split.crs_X), compute_degree(split.crs_Y)
    glued = []
    for a in cx.curves:
        for b in cy.curves:
            tree = glue(a.tree, b.tree, split.shared)
            m = multiplicity(tree, crs)
            if m != a.multiplicity * b.multiplicity:
                return f"{crs}: glued multiplicity {m} != {a.multiplicity}*{b.multiplicity}"
            glued.append((tree.key, tree.length_vector, m))
    if sorted(glued) != full.multiset:
        return f"{crs}: glued curves differ from the preimage"
    return None


def product_sweep(n_values: Sequence[int], instances: int, seed: int = 0) -> Check:
    start = time.perf_counter()
    check = Check("product formula and gluing")
    rng = random.Random(f"{seed}:product")
    while check.cases < instances:
        n = n_values[check.cases % len(n_values)]
        crs = random_decomposable(n, rng)
        try:
            msg = check_product(crs)
        except NonGeneric:
            continue
        check.cases += 1
        if msg:
            check.fail(msg)
    return _timed(check, start)


# -- whole suite -----------------------------------------------------------
def run_suite(n_max: int, seed: int = 0, jobs: int = 1, log: Callable[[str], None] | None = None) -> list[Check]:
    """Run every sweep up to ``n_max`` markings (at most 9)."""
    n_max = min(max(n_max, 5), 9)
    small = min(n_max, 8)
    steps: list[Callable[[], Check]] = [
        lambda: count_sweep(range(4, small + 1), range(4, n_max + 1)),
        *[(lambda n=n: theorem_sweep(n, draws=2, mixed=5 if n <= 8 else 0, seed=seed, jobs=jobs))
          for n in range(4, n_max + 1)],
        lambda: inverted_sweep([n for n in range(4, small + 1) if n % 2 == 0], seed),
        *[(lambda n=n: oracle_sweep(n, 20, seed)) for n in range(5, min(n_max, 7) + 1)],
        lambda: invariance_sweep(min(n_max, 6), 10, seed=seed),
        lambda: product_sweep(list(range(5, small + 1)), 20, seed),
    ]
    out = []
    for step in steps:
        check = step()
        out.append(check)
        if log:
            log(check.line())
    return out
