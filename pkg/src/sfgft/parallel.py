"""Deterministic thread mapping for embarrassingly parallel loops.

Results are gathered by input index, so the output is identical for any
worker count; parallelism never changes what gets computed, only when.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV_VAR = "SFGFT_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Pick a worker count: explicit argument, else SFGFT_THREADS, else 1."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def thread_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Map fn over items, optionally on a thread pool, preserving order."""
    seq: Sequence[T] = list(items)
    if threads <= 1 or len(seq) <= 1:
        return [fn(it) for it in seq]
    with ThreadPoolExecutor(max_workers=min(threads, len(seq))) as pool:
        return list(pool.map(fn, seq))
