from __future__ import annotations

import json
import random
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropcount.crossratio import CrossRatioSet
from tropcount.degree import brute_force_degree, generic_lengths
from tropcount.errors import InvalidInput
from tropcount.search import (
    SpectrumReport, _combos_from, _instances, _unrank, all_quads, case_split_cases, degree_of,
    hall_obstruction, space_size, spectrum, verify_report, verify_witness,
)


@given(st.integers(5, 7), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_counting_shortcut_is_sound(n, seed):
    rng = random.Random(seed)
    sets = rng.sample(all_quads(n), n - 3)
    if hall_obstruction(sets):
        crs = CrossRatioSet.from_marking_sets(sets, n=n, lengths=generic_lengths(sets, seed))
        assert brute_force_degree(crs).degree == 0


def test_shortcut_examples():
    assert hall_obstruction([(1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 4, 5)])
    assert not hall_obstruction([(1, 2, 3, 6), (2, 3, 4, 5), (1, 4, 5, 6)])
    sets = [(1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 4, 5)]
    assert degree_of(sets, 6, 0) == degree_of(sets, 6, 0, shortcut=False) == 0


@pytest.mark.parametrize("m,k", [(7, 3), (10, 4), (15, 1)])
def test_unrank_matches_lexicographic_order(m, k):
    every = list(combinations(range(m), k))
    for r, c in enumerate(every):
        assert tuple(_unrank(m, k, r)) == c
    assert list(_combos_from(m, k, 5)) == every[5:]


def test_space_sizes():
    assert space_size(7, "exhaustive") == comb(35, 4)
    assert len(case_split_cases(9)) == 4
    assert space_size(9, "case-split") == 4 * comb(124, 4)
    with pytest.raises(InvalidInput):
        space_size(9, "sample")


def test_case_split_instances_start_with_fixed_pair():
    for i, u, _ in _instances(8, "case-split", 0, 0, 50):
        assert u[0] == (1, 2, 3, 4) and len(set(u)) == 5


def test_sampling_is_reproducible():
    a = list(_instances(9, "sample", 3, 10, 20))
    assert a == list(_instances(9, "sample", 3, 10, 20))
    assert a != list(_instances(9, "sample", 4, 10, 20))


@pytest.mark.parametrize("n,expected", [(5, {1}), (6, {0, 1, 2})])
def test_small_exhaustive_spectra(n, expected):
    report = spectrum(n, "exhaustive")
    assert report.degrees == expected
    assert report.instances_checked == space_size(n, "exhaustive")
    assert report.complete
    again = verify_report(report, brute=True)
    assert all(d == v for d, v in again.items())


def test_report_json_round_trip():
    report = spectrum(6, "exhaustive")
    assert SpectrumReport.from_json(json.loads(json.dumps(report.to_json()))) == report


def test_parallel_and_checkpointed_runs_agree(tmp_path):
    serial = spectrum(7, "sample", 300, 5)
    assert spectrum(7, "sample", 300, 5, jobs=2) == serial
    path = tmp_path / "run.jsonl"
    first = spectrum(7, "sample", 300, 5, checkpoint=str(path))
    assert first == serial
    lines = path.read_text().splitlines()
    assert "header" in json.loads(lines[0])
    # A resumed run reads every batch back instead of recomputing it.
    resumed = spectrum(7, "sample", 300, 5, checkpoint=str(path))
    assert resumed == serial
    assert path.read_text().splitlines() == lines
    with pytest.raises(InvalidInput, match="different run"):
        spectrum(7, "sample", 300, 6, checkpoint=str(path))


def test_guardrails():
    with pytest.raises(InvalidInput, match="force"):
        spectrum(8, "exhaustive")
    with pytest.raises(InvalidInput, match="budget"):
        spectrum(8, "sample")
    with pytest.raises(InvalidInput):
        spectrum(8, "bogus", 10)
    with pytest.raises(InvalidInput, match="force"):
        spectrum(9, "case-split")


def test_capped_case_split_is_incomplete():
    report = spectrum(8, "case-split", budget=200)
    assert not report.complete and report.instances_checked == 200


def test_climb_finds_witnesses():
    report = spectrum(7, "climb", budget=150, seed=1)
    assert report.instances_checked == 150
    assert 2 in report.degrees
    for d, u in report.witnesses.items():
        assert verify_witness(u, 7, 99) == d
