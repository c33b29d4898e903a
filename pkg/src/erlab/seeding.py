"""Deterministic, splittable random streams.

Every stochastic routine in this package takes a SeedSpec instead of a bare
integer.  A SeedSpec names a Philox counter-based stream: ``master_seed`` and
``stream_id`` form the 128-bit key, and substream ``i`` starts the 256-bit
counter at ``i * 2**64``, so substreams never overlap and can be generated in
any order (or on any number of workers) with identical output.

Convention used throughout: replicate ``r`` of a Monte Carlo run draws from
``seed.substream(r)``; direct one-shot draws use ``seed.substream(0)``.
Separate concerns get separate ``stream_id`` values.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

_U64 = 1 << 64

# Fixed Monte Carlo chunk width.  Results must not depend on the worker
# count, so chunk boundaries are a module constant, never derived from it.
CHUNK = 4096


@dataclass(frozen=True)
class SeedSpec:
    """Names one random stream. Equal specs reproduce identical draws."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < _U64):
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if not (0 <= int(self.stream_id) < _U64):
            raise ValueError("stream_id must be a non-negative 64-bit integer")

    def with_stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)

    def substream(self, index: int) -> np.random.Generator:
        """Generator for non-overlapping substream ``index`` of this stream."""
        if index < 0:
            raise ValueError("substream index must be non-negative")
        key = int(self.master_seed) + (int(self.stream_id) << 64)
        return np.random.Generator(np.random.Philox(key=key, counter=index << 64))

    def generator(self) -> np.random.Generator:
        return self.substream(0)


def map_indexed(fn, count: int, workers: int = 1) -> list:
    """Run ``fn(i)`` for i in range(count), returning results in index order.

    The execution schedule may be parallel but the returned list is always
    ordered, so any reduction over it is worker-count invariant.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def chunk_ranges(total: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(a, min(a + chunk, total)) for a in range(0, total, chunk)]
