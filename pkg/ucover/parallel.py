"""Seed derivation and deterministic parallel trial execution."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from ucover.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def substream_seed(base_seed: int, index: int) -> int:
    """Derive the 64-bit seed of trial `index` from a base seed.

    Adding trials never changes the seeds of earlier ones.
    """
    sequence = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def trial_seeds(base_seed: int, trials: int) -> List[int]:
    """Seeds for trials 0..trials-1."""
    return [substream_seed(base_seed, i) for i in range(trials)]


def trial_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply fn to every item on a thread pool, returning results in input order.

    Args:
        fn: Pure per-trial function
        items: Trial inputs
        threads: Worker count (default: settings.threads)

    Returns:
        Results, ordered like items
    """
    items = list(items)
    workers = threads or get_settings().threads
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Running {len(items)} trials on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
