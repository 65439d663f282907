"""Runs independent experiments in worker processes."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
import logging
import os
from typing import TypeVar

logger = logging.getLogger(__name__)

WORKERS_ENV = "SESOP_MG_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def worker_count(explicit: int | None = None) -> int:
    """``explicit`` if given, else ``$SESOP_MG_WORKERS``, else 1."""
    if explicit is not None:
        value = explicit
    else:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"worker count must be positive, got {value}")
    return value


def run_all(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """``[fn(item) for item in items]``, in order; one process per slot when ``workers > 1``."""
    workers = worker_count(workers)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(workers, len(items))
    logger.info("running %d jobs on %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
