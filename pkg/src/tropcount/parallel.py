"""Order-preserving process-pool map."""

from __future__ import annotations

import multiprocessing
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1, chunksize: int = 1) -> list[R]:
    """``[fn(x) for x in items]``, possibly on ``jobs`` worker processes.

    Results come back in input order, so any reduction over them is the same
    for every ``jobs``.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with multiprocessing.Pool(min(jobs, len(items))) as pool:
        return pool.map(fn, items, chunksize=chunksize)
