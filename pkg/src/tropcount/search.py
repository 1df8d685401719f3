"""Which degrees occur for ``n`` markings?

Four ways to walk through sets ``U`` of ``n-3`` four-element marking sets:

* ``exhaustive``: every ``U`` (refused for ``n > 7`` unless forced);
* ``case-split``: ``U`` contains ``{1,2,3,4}`` and one of ``{1,2,3,n}``,
  ``{1,2,n-1,n}``, ``{1,n-2,n-1,n}``, ``{n-3,n-2,n-1,n}``, plus any other sets;
* ``sample``: ``budget`` independent uniform draws;
* ``climb``: random-restart hill climbing on the degree, which reaches the
  rare large degrees far sooner than uniform draws.

Instances are numbered; instance ``i`` depends only on ``(n, mode, seed, i)``,
so a run can be cut into batches, spread over processes and resumed from a
checkpoint with identical results.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, inf
from typing import Callable, Iterable, Iterator, Sequence

from tropcount.crossratio import CrossRatioSet
from tropcount.degree import brute_force_degree, generic_degree, generic_lengths
from tropcount.errors import GenericityFailure, InvalidInput
from tropcount.parallel import pmap

MODES = ("exhaustive", "case-split", "sample", "climb")
MAX_EXHAUSTIVE_N = 7
MAX_UNFORCED_CASES = 10 ** 6      # case-split runs above this need force
BATCH = 2000
CLIMB_STEPS = 150

Sets = tuple[tuple[int, int, int, int], ...]


@dataclass
class SpectrumReport:
    n: int
    mode: str
    seed: int
    budget: int | None = None
    degrees: set[int] = field(default_factory=set)
    witnesses: dict[int, Sets] = field(default_factory=dict)
    instances_checked: int = 0
    complete: bool = True

    @property
    def max_degree(self) -> int | None:
        return max(self.degrees) if self.degrees else None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "seed": self.seed,
            "budget": self.budget,
            "degrees": sorted(self.degrees),
            "witnesses": {str(d): [list(s) for s in u] for d, u in sorted(self.witnesses.items())},
            "instances_checked": self.instances_checked,
            "complete": self.complete,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectrumReport":
        return cls(
            n=obj["n"], mode=obj["mode"], seed=obj["seed"], budget=obj.get("budget"),
            degrees=set(obj["degrees"]),
            witnesses={int(d): tuple(tuple(s) for s in u) for d, u in obj["witnesses"].items()},
            instances_checked=obj["instances_checked"], complete=obj.get("complete", True),
        )


def all_quads(n: int) -> list[tuple[int, int, int, int]]:
    return list(combinations(range(1, n + 1), 4))


# -- degree of a set of marking sets -------------------------------------
def hall_obstruction(sets: Sequence[Iterable[int]]) -> bool:
    """Do some ``k`` of the sets use fewer than ``k + 3`` markings?

    Then those ``k`` conditions factor through a space of dimension below
    ``k`` and the degree is 0.
    """
    sets = [frozenset(s) for s in sets]
    m = len(sets)
    for mask in range(1, 1 << m):
        used: set = set()
        k = 0
        for i in range(m):
            if mask >> i & 1:
                used |= sets[i]
                k += 1
        if len(used) < k + 3:
            return True
    return False


def degree_of(sets: Sequence[Iterable[int]], n: int, seed: int, *, shortcut: bool = True) -> int:
    """Degree of ``U`` with the sorted pairing and lengths drawn from ``seed``."""
    if shortcut and hall_obstruction(sets):
        return 0
    crs = CrossRatioSet.from_marking_sets(sets, n=n)
    return generic_degree(crs, seed).degree


def verify_witness(sets: Sequence[Iterable[int]], n: int, seed: int, *, brute: bool = False) -> int:
    """Recompute a degree from scratch with fresh lengths and no shortcut."""
    crs = CrossRatioSet.from_marking_sets(sets, n=n)
    if not brute:
        return generic_degree(crs, seed).degree
    for attempt in range(64):
        try:
            return brute_force_degree(crs.with_lengths(generic_lengths(sets, seed + attempt))).degree
        except ArithmeticError:
            continue
    raise GenericityFailure("no generic length draw found")


# -- instance spaces -----------------------------------------------------
def _unrank(m: int, k: int, rank: int) -> list[int]:
    """The ``rank``-th ``k``-subset of ``range(m)`` in lexicographic order."""
    out = []
    x = 0
    for i in range(k):
        while True:
            c = comb(m - x - 1, k - i - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(x)
        x += 1
    return out


def _combos_from(m: int, k: int, start: int) -> Iterator[tuple[int, ...]]:
    if start >= comb(m, k):
        return
    idx = _unrank(m, k, start)
    while True:
        yield tuple(idx)
        i = k - 1
        while i >= 0 and idx[i] == m - k + i:
            i -= 1
        if i < 0:
            return
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1


def case_split_cases(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    s1 = (1, 2, 3, 4)
    return [(s1, s) for s in ((1, 2, 3, n), (1, 2, n - 1, n), (1, n - 2, n - 1, n), (n - 3, n - 2, n - 1, n))
            if s != s1]


def space_size(n: int, mode: str) -> int:
    m = comb(n, 4)
    if mode == "exhaustive":
        return comb(m, n - 3)
    if mode == "case-split":
        return len(case_split_cases(n)) * comb(m - 2, n - 5)
    raise InvalidInput(f"mode {mode!r} has no finite instance space")


def _instances(n: int, mode: str, seed: int, start: int, stop: int) -> Iterator[tuple[int, Sets, int]]:
    """Yield ``(index, U, length_seed)`` for ``start <= index < stop``."""
    quads = all_quads(n)
    m = len(quads)
    if mode == "exhaustive":
        for i, combo in zip(range(start, stop), _combos_from(m, n - 3, start)):
            yield i, tuple(quads[j] for j in combo), seed + i
    elif mode == "case-split":
        per = comb(m - 2, n - 5)
        i = start
        while i < stop:
            case, offset = divmod(i, per)
            fixed = case_split_cases(n)[case]
            rest = [q for q in quads if q not in fixed]
            take = min(stop, (case + 1) * per) - i
            for j, combo in zip(range(take), _combos_from(len(rest), n - 5, offset)):
                yield i + j, fixed + tuple(rest[x] for x in combo), seed + i + j
            i += take
    elif mode == "sample":
        for i in range(start, stop):
            rng = random.Random(f"{seed}:{i}")
            u = tuple(sorted(rng.sample(quads, n - 3)))
            yield i, u, rng.getrandbits(32)
    else:
        raise InvalidInput(f"unknown mode {mode!r}")


def _run_batch(args) -> tuple[int, int, dict[int, Sets]]:
    n, mode, seed, start, stop, shortcut = args
    found: dict[int, Sets] = {}
    for _, u, lseed in _instances(n, mode, seed, start, stop):
        found.setdefault(degree_of(u, n, lseed, shortcut=shortcut), u)
    return start, stop, found


def _climb(n: int, seed: int, budget: int, shortcut: bool,
           stop_at: int | None = None) -> tuple[int, dict[int, Sets]]:
    """Random-restart hill climbing; ``budget`` counts degree evaluations."""
    rng = random.Random(f"climb:{seed}")
    quads = all_quads(n)
    found: dict[int, Sets] = {}
    evals = 0

    def evaluate(u) -> int:
        nonlocal evals
        evals += 1
        d = degree_of(u, n, rng.getrandbits(32), shortcut=shortcut)
        found.setdefault(d, tuple(sorted(u)))
        return d

    while evals < budget and not (stop_at is not None and found and max(found) >= stop_at):
        cur = rng.sample(quads, n - 3)
        best = evaluate(cur)
        for _ in range(CLIMB_STEPS):
            if evals >= budget:
                break
            cand = list(cur)
            cand[rng.randrange(n - 3)] = rng.choice(quads)
            if len(set(cand)) < n - 3:
                continue
            d = evaluate(cand)
            if d >= best:
                cur, best = cand, d
    return evals, found


# -- checkpoints ---------------------------------------------------------
def _read_checkpoint(path: str, header: dict) -> list[dict]:
    if not os.path.exists(path):
        return []
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines:
        return []
    if lines[0].get("header") != header:
        raise InvalidInput(f"checkpoint {path} belongs to a different run: {lines[0].get('header')}")
    return [rec for rec in lines[1:] if "index_range" in rec]


def _open_checkpoint(path: str, header: dict):
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    fh = open(path, "a")
    if fresh:
        fh.write(json.dumps({"header": header}) + "\n")
        fh.flush()
    return fh


def _merge(report: SpectrumReport, found: dict[int, Sets]):
    for d, u in found.items():
        report.degrees.add(d)
        report.witnesses.setdefault(d, tuple(tuple(s) for s in u))


def spectrum(n: int, mode: str = "sample", budget: int | None = None, seed: int = 0, *,
             jobs: int = 1, checkpoint: str | None = None, force: bool = False,
             shortcut: bool = True, stop_at: int | None = None,
             progress: Callable[[int, int], None] | None = None) -> SpectrumReport:
    """Collect the degrees reached by ``U`` with ``n`` markings.

    ``budget`` caps the number of instances (required for ``sample`` and
    ``climb``).  Witnesses are the first instance, by index, reaching each
    degree, so reports do not depend on ``jobs``.  With ``stop_at`` the run
    ends after the first group of batches reaching that degree.
    """
    if n < 5:
        raise InvalidInput("spectrum needs n >= 5")
    if mode not in MODES:
        raise InvalidInput(f"unknown mode {mode!r}; use one of {', '.join(MODES)}")
    if mode == "exhaustive" and n > MAX_EXHAUSTIVE_N and not force:
        raise InvalidInput(
            f"exhaustive search for n = {n} visits {space_size(n, mode):,} sets; "
            "use case-split, sample or climb, or force the run")
    if mode == "case-split" and not force and min(budget or inf, space_size(n, mode)) > MAX_UNFORCED_CASES:
        raise InvalidInput(
            f"case-split search for n = {n} visits {space_size(n, mode):,} sets; "
            "give a budget, or force the run")
    if mode in ("sample", "climb") and not budget:
        raise InvalidInput(f"mode {mode} needs a positive budget")
    report = SpectrumReport(n, mode, seed, budget)

    if mode == "climb":
        evals, found = _climb(n, seed, budget, shortcut, stop_at)
        report.instances_checked = evals
        _merge(report, found)
        return report

    total = budget if mode == "sample" else space_size(n, mode)
    if budget is not None and mode != "sample":
        report.complete = budget >= total
        total = min(total, budget)
    header = {"n": n, "mode": mode, "seed": seed, "budget": budget, "shortcut": shortcut}
    done: dict[int, tuple[int, dict]] = {}
    if checkpoint:
        for rec in _read_checkpoint(checkpoint, header):
            a, b = rec["index_range"]
            done[a] = (b, {int(d): tuple(tuple(s) for s in u) for d, u in rec["witnesses"].items()})
    batches = [(a, min(a + BATCH, total)) for a in range(0, total, BATCH)]
    todo = [(n, mode, seed, a, b, shortcut) for a, b in batches if a not in done]
    fh = _open_checkpoint(checkpoint, header) if checkpoint else None
    try:
        step = max(1, jobs) * 4
        for i in range(0, len(todo), step):
            for a, b, found in pmap(_run_batch, todo[i:i + step], jobs=jobs):
                done[a] = (b, found)
                if fh:
                    fh.write(json.dumps({
                        "index_range": [a, b],
                        "degrees_found": sorted(found),
                        "witnesses": {str(d): [list(s) for s in u] for d, u in found.items()},
                    }) + "\n")
                    fh.flush()
            if progress:
                progress(sum(b - a for a, (b, _) in done.items()), total)
            if stop_at is not None and any(d >= stop_at for _, found in done.values() for d in found):
                report.complete = False
                break
    finally:
        if fh:
            fh.close()
    for a in sorted(done):
        b, found = done[a]
        report.instances_checked += b - a
        _merge(report, found)
    return report


def verify_report(report: SpectrumReport, seed: int = 1, *, brute: bool = False) -> dict[int, int]:
    """Recompute every witness with fresh lengths; returns degree -> recomputed."""
    return {d: verify_witness(u, report.n, seed + d, brute=brute)
            for d, u in sorted(report.witnesses.items())}
