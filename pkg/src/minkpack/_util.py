"""Small shared helpers for word enumeration and label normalization."""

from __future__ import annotations

import numpy as np

#: default cap on the number of cylinders any enumeration may produce
DEFAULT_BUDGET = 5_000_000


def words_matrix(n_digits: int, depth: int) -> np.ndarray:
    """All depth-k words over n digits as an (n^k, k) index matrix, counting order."""
    count = n_digits**depth
    words = np.empty((count, depth), dtype=np.int16)
    idx = np.arange(count)
    for pos in range(depth):
        words[:, pos] = (idx // (n_digits ** (depth - 1 - pos))) % n_digits
    return words


def relabel_first_occurrence(roots: np.ndarray) -> np.ndarray:
    """Normalize arbitrary group ids to 0..k-1 in order of first appearance."""
    uniq, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[order] = np.arange(len(uniq), dtype=np.int64)
    return rank[inverse]


def power_table(base: int, depth: int) -> np.ndarray:
    """[base^0, base^-1, ..., base^-depth] by repeated division.

    Every distance comparison in the symbolic modules draws from this table
    (or replays the same division chain), so thresholds and distances agree
    bit for bit.
    """
    out = np.empty(depth + 1)
    v = 1.0
    out[0] = v
    for i in range(1, depth + 1):
        v = v / base
        out[i] = v
    return out


def power_threshold(base: int, bound: float, strict: bool = False) -> int:
    """Smallest a with base^-a <= bound (or < bound when strict)."""
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    a = 0
    v = 1.0
    if strict:
        while v >= bound:
            v = v / base
            a += 1
    else:
        while v > bound:
            v = v / base
            a += 1
    return a
