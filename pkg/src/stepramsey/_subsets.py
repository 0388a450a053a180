"""Vectorized color counting over batches of k-subsets of a small universe.

A coloring of the pairs or triples of ``{0..L-1}`` is a flat array indexed by
colex rank. A batch of sorted subsets is an ``(B, n)`` int64 array.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

# cap on B * C(n, arity) per batch, bounds peak memory at a few hundred MB
BATCH_CELLS = 1 << 22


def batch_rows(n: int, arity: int) -> int:
    return max(1, BATCH_CELLS // max(1, comb(n, arity)))


def _positions(n: int, arity: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), arity)), dtype=np.int64).reshape(-1, arity)


def count_colors(table: np.ndarray, arity: int, subsets: np.ndarray, q: int) -> np.ndarray:
    """Number of distinct colors induced by each row of ``subsets``."""
    subsets = np.asarray(subsets, dtype=np.int64)
    pos = _positions(subsets.shape[1], arity)
    if arity == 2:
        a, b = subsets[:, pos[:, 0]], subsets[:, pos[:, 1]]
        ranks = b * (b - 1) // 2 + a
    else:
        a, b, c = subsets[:, pos[:, 0]], subsets[:, pos[:, 1]], subsets[:, pos[:, 2]]
        ranks = c * (c - 1) * (c - 2) // 6 + b * (b - 1) // 2 + a
    colors = table[ranks]
    if q <= 64:
        masks = np.bitwise_or.reduce(np.left_shift(np.uint64(1), colors.astype(np.uint64)), axis=1)
        return np.bitwise_count(masks).astype(np.int64)
    colors = np.sort(colors, axis=1)
    return 1 + np.count_nonzero(np.diff(colors, axis=1), axis=1)


def combination_batches(L: int, n: int, rows: int) -> Iterator[np.ndarray]:
    """All n-subsets of ``range(L)`` in lexicographic order, ``rows`` at a time."""
    it = itertools.combinations(range(L), n)
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, rows)),
                           dtype=np.int64)
        if flat.size == 0:
            return
        yield flat.reshape(-1, n)


def check_batch(args) -> tuple[int, int, int | None]:
    """``(rows, min colors, index of first row below t)`` for one batch."""
    table, arity, subsets, q, t = args
    counts = count_colors(table, arity, subsets, q)
    bad = np.nonzero(counts < t)[0]
    return len(subsets), int(counts.min()), int(bad[0]) if bad.size else None


def map_ordered(fn: Callable, jobs: Iterable, workers: int) -> Iterator:
    """``map(fn, jobs)``, in order, optionally on a process pool."""
    if workers <= 1:
        yield from map(fn, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, jobs)


def scan(table: np.ndarray, arity: int, q: int, t: int, batches: Iterable[np.ndarray],
         workers: int = 1, stop_at_first: bool = False
         ) -> tuple[int, int | None, np.ndarray | None]:
    """Check every subset in ``batches``.

    Returns ``(subsets checked, minimum colors seen, first failing subset)``.
    The first failure is the earliest in batch order regardless of ``workers``.
    """
    checked, low, first = 0, None, None
    jobs = ((table, arity, b, q, t) for b in batches)
    batches_seen = []

    def tracked():
        for job in jobs:
            batches_seen.append(job[2])
            yield job

    for i, (rows, mn, bad) in enumerate(map_ordered(check_batch, tracked(), workers)):
        checked += rows
        low = mn if low is None else min(low, mn)
        if bad is not None and first is None:
            first = batches_seen[i][bad]
            if stop_at_first:
                break
        batches_seen[i] = None
    return checked, low, first


def as_sorted_rows(subsets: Sequence[Sequence[int]]) -> np.ndarray:
    return np.sort(np.asarray(subsets, dtype=np.int64), axis=1)
