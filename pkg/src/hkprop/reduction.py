"""Deterministic chunked execution and fixed-topology pairwise reduction.

Work is always cut into the same fixed-size chunks regardless of how many
workers run them, per-chunk results are computed by identical numpy call
sequences, and partial results are combined along a fixed binary tree over
the chunk index.  Outputs are therefore bitwise identical for any worker
count.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def chunk_ranges(n, chunk):
    """[(start, stop), ...] cutting range(n) into fixed chunks."""
    if chunk < 1:
        raise ValueError("chunk size must be >= 1")
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def tree_reduce(parts):
    """Sum a list of equal-shaped arrays along a fixed pairwise tree."""
    if not parts:
        raise ValueError("nothing to reduce")
    parts = list(parts)
    while len(parts) > 1:
        nxt = []
        for i in range(0, len(parts) - 1, 2):
            nxt.append(parts[i] + parts[i + 1])
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


class PairwiseAccumulator:
    """Streaming pairwise summation with a fixed binary-counter topology.

    Adding the k-th partial merges it with earlier partials exactly as a
    bottom-up pairwise tree would, but only O(log n) partials are held at
    any time.  The running total can be snapshot at any point, which is how
    nested-ladder prefix sums are produced without storing every chunk.
    """

    def __init__(self):
        self._levels = []

    def add(self, part):
        for i in range(len(self._levels)):
            if self._levels[i] is None:
                self._levels[i] = part
                return
            part = self._levels[i] + part
            self._levels[i] = None
        self._levels.append(part)

    def total(self):
        """Sum of everything added so far (fixed low-to-high level order)."""
        total = None
        for level in self._levels:
            if level is None:
                continue
            total = level.copy() if total is None else total + level
        if total is None:
            raise ValueError("nothing accumulated")
        return total


def chunked_map(fn, n, chunk, workers=1):
    """Apply fn(start, stop) to every chunk; results ordered by chunk index."""
    ranges = chunk_ranges(n, chunk)
    if workers <= 1:
        return [fn(s, e) for s, e in ranges]
    results = [None] * len(ranges)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(fn, s, e): i for i, (s, e) in enumerate(ranges)}
        for fut, i in futures.items():
            results[i] = fut.result()
    return results
