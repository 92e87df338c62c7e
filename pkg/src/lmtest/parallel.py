"""Process-pool map with a worker cap from ``LMTEST_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional


def worker_count(requested: Optional[int] = None) -> int:
    """Requested (or CPU) count, capped by ``LMTEST_THREADS`` when set."""
    n = (os.cpu_count() or 1) if requested is None else int(requested)
    env = os.environ.get("LMTEST_THREADS")
    if env:
        n = min(n, int(env))
    return max(1, n)


def parallel_map(fn: Callable, items: Iterable, workers: Optional[int] = None
                 ) -> List:
    """Ordered map; runs in-process when only one worker is available."""
    items = list(items)
    n = min(worker_count(workers), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
