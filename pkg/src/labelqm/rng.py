"""
Seeded, splittable random streams.

Every random draw in the package comes from a PCG64 generator whose SeedSequence
is ``SeedSequence(entropy=seed, spawn_key=(purpose, index))``. SeedSequence hashes
the pair, so the stream for chunk ``index`` is a fixed function of ``(seed,
purpose, index)`` and nothing else. Work is cut into fixed-size chunks before any
worker sees it; merged results therefore do not depend on the worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

CHUNK_SIZE = 1 << 14
T = TypeVar("T")

# purpose tags keep unrelated streams apart under the same user seed
PROTOCOL, PAIR, SINGLET, TWOSLIT_PIXEL, TWOSLIT_TAG, TWOSLIT_SLIT, RESTART, DIRECTIONS = range(8)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(purpose, index))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunks(
    n: int,
    seed: int,
    purpose: int,
    work: Callable[[np.random.Generator, int, int], T],
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> list[T]:
    """Call ``work(rng, chunk_index, size)`` per chunk; results come back in chunk order."""
    sizes = chunk_sizes(n, chunk_size)
    jobs = [(stream(seed, purpose, c), c, size) for c, size in enumerate(sizes)]
    if workers <= 1 or len(jobs) <= 1:
        return [work(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: work(*job), jobs))


def categorical(rng: np.random.Generator, probs: np.ndarray, size: int) -> np.ndarray:
    """Inverse-CDF draws of indices from ``probs`` (need not be exactly normalized)."""
    cdf = np.cumsum(probs)
    u = rng.random(size) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1)
