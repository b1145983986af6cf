"""Order-preserving worker pool for the per-relator scans."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from sc_forge.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """fn over items, results in input order; runs inline when one thread is allowed"""
    items = list(items)
    workers = min(threads or get_settings().threads, len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d items over %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
