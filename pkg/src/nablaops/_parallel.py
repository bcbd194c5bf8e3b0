"""Process-level fan-out for exhaustive checks, capped by NABLA_OPS_JOBS."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def max_jobs() -> int:
    raw = os.environ.get("NABLA_OPS_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map; runs in worker processes when more than one job is allowed."""
    items = list(items)
    jobs = min(max_jobs(), len(items))
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))
