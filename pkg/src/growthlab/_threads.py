"""Thread-pool helper honouring the GROWTHLAB_THREADS cap."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_threads() -> int:
    val = os.environ.get("GROWTHLAB_THREADS")
    if val:
        try:
            return max(1, int(val))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def thread_map(fn, items):
    """Parallel map with deterministic output order; serial when capped at 1."""
    items = list(items)
    workers = min(max_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
