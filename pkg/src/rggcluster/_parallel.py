"""Process-based map over independent work items, honoring RGG_THREADS.

Work items carry their own random-stream keys, so results are identical for
any worker count; only wall time changes.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker count from RGG_THREADS, defaulting to all cores."""
    raw = os.environ.get("RGG_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("RGG_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Map ``fn`` over ``items`` preserving order.

    ``fn`` must be picklable (a module-level function).  Falls back to a
    serial loop for one worker or trivially small workloads.
    """
    items = list(items)
    if workers is None:
        workers = thread_count()
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def split_ranges(total: int, pieces: int) -> list[tuple[int, int]]:
    """Split range(total) into at most ``pieces`` contiguous (start, stop) spans."""
    pieces = max(1, min(pieces, total))
    step = (total + pieces - 1) // pieces
    return [(i, min(i + step, total)) for i in range(0, total, step)]
