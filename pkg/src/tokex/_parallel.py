from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

# Fixed chunking keeps floating-point results independent of the worker count.
CHUNK = 250


def chunks(n_items: int, size: int = CHUNK) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, n_items)) for lo in range(0, n_items, size)]


def map_chunks(fn: Callable[[int, int], T], n_items: int, threads: int = 1,
               size: int = CHUNK) -> list[T]:
    """Apply ``fn(lo, hi)`` over fixed index chunks; results in index order."""
    spans = chunks(n_items, size)
    if threads is None or threads <= 1 or len(spans) <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda span: fn(*span), spans))
