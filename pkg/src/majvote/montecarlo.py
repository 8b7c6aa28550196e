"""Seeded, worker-split Monte-Carlo plumbing.

A run with ``workers = w`` splits its trials into ``w`` contiguous shares;
share ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``. The
result depends only on ``(seed, trials, w)``, never on thread scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np

from .errors import InvalidInputError

T = TypeVar("T")

CHUNK = 1 << 17


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    trials: int
    successes: int

    @classmethod
    def from_counts(cls, successes: int, trials: int) -> "MCEstimate":
        p = successes / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials, successes)

    def within(self, reference: float, n_se: float) -> bool:
        if self.stderr == 0.0:
            return abs(self.mean - reference) <= 1e-12
        return abs(self.mean - reference) <= n_se * self.stderr


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < 2**64:
        raise InvalidInputError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def check_workers(workers) -> int:
    if int(workers) != workers or workers < 1:
        raise InvalidInputError(f"workers must be a positive integer, got {workers!r}")
    return int(workers)


def split_count(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (i < extra) for i in range(workers)]


def substreams(seed: int, count: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(check_seed(seed)).spawn(count)
    return [np.random.default_rng(s) for s in children]


def run_split(
    work: Callable[[np.random.Generator, int], T],
    seed: int,
    total: int,
    workers: int = 1,
) -> list[T]:
    """Call ``work(rng, share)`` once per worker; results in worker order."""
    workers = check_workers(workers)
    shares = split_count(total, workers)
    rngs = substreams(seed, workers)
    if workers == 1:
        return [work(rngs[0], shares[0])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, rngs, shares))


def chunks(total: int, size: int = CHUNK):
    done = 0
    while done < total:
        step = min(size, total - done)
        yield step
        done += step
