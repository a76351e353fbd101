"""Deterministic work-unit mapping, serial or across processes.

Results always come back in submission order, so callers see identical
output for any worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int) -> int:
    """0 means all available cores; otherwise the requested count."""
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    return workers or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to every item, preserving item order in the result.

    ``fn`` must be a module-level function and the items picklable when
    workers != 1.
    """
    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (n_workers * 4))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
