"""Counter-based random substreams and deterministic chunked execution.

Every random draw in the package comes from a generator derived from a
``(master seed, purpose, index)`` triple.  The index is a chunk number (or a
trial number for single-trial helpers), never a worker id, so results do not
depend on how many threads process the chunks.
"""
from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TypeVar, Union

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "CHUNK_TRIALS",
    "THREADS_ENV",
    "StreamKey",
    "as_generator",
    "chunk_bounds",
    "default_threads",
    "map_chunks",
]

#: Trials per random substream.  Fixed so that the stream layout never
#: depends on the worker count.
CHUNK_TRIALS = 4096

#: Environment variable holding the default worker-thread count.
THREADS_ENV = "OVERLAYTC_THREADS"

T = TypeVar("T")


def _purpose_code(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


@dataclass(frozen=True)
class StreamKey:
    """Names one independent random substream."""

    seed: int
    purpose: str = "default"
    index: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.index < 0:
            raise InvalidParameterError("seed and stream index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            self.seed, spawn_key=(_purpose_code(self.purpose), self.index)
        )
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "StreamKey":
        return StreamKey(self.seed, self.purpose, index)


RngLike = Union[StreamKey, np.random.Generator]


def as_generator(stream: RngLike) -> np.random.Generator:
    """Return a generator for ``stream``; generators pass through unchanged."""
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, StreamKey):
        return stream.generator()
    raise TypeError(f"expected StreamKey or numpy Generator, got {type(stream).__name__}")


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, n)


def chunk_bounds(trials: int, chunk: int = CHUNK_TRIALS) -> list[tuple[int, int]]:
    """Split ``range(trials)`` into consecutive ``(start, stop)`` chunks."""
    return [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]


def map_chunks(
    fn: Callable[[int, int, int], T],
    trials: int,
    threads: int | None = None,
) -> list[T]:
    """Evaluate ``fn(chunk_index, start, stop)`` for every chunk, in chunk order.

    The returned list is ordered by chunk regardless of completion order, so
    any order-sensitive reduction the caller performs stays deterministic.
    """
    bounds = chunk_bounds(trials)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(bounds) == 1:
        return [fn(i, s, e) for i, (s, e) in enumerate(bounds)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, i, s, e) for i, (s, e) in enumerate(bounds)]
        return [f.result() for f in futures]

