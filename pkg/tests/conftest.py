from __future__ import annotations

import itertools

import pytest

from tropcount.exactmath import IntMatrix


def same_up_to_permutation(a, b) -> bool:
    """Are two square 0/1 matrices equal after permuting rows and columns?"""
    a = IntMatrix.of(a).tolist()
    b = IntMatrix.of(b).tolist()
    n = len(a)
    if n != len(b):
        return False
    target = sorted(map(tuple, b))
    for cols in itertools.permutations(range(n)):
        if sorted(tuple(row[j] for j in cols) for row in a) == target:
            return True
    return False


@pytest.fixture
def hexagon_sets():
    return [(1, 2, 3, 6), (2, 3, 4, 5), (1, 4, 5, 6)]


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
