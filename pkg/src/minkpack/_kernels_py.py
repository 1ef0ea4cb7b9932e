"""Pure-Python/numpy kernels: fallback twin of the compiled extension.

Every function here has a compiled counterpart in ``_kernels.pyx`` with the
same signature and bit-identical output; which one runs is decided at import
time in ``_backend``.  Keep the floating-point operations (accumulation
order, comparison sense) in lockstep with the .pyx file.
"""

from __future__ import annotations

import itertools

import numpy as np

BACKEND_NAME = "python"


def pack_greedy(points: np.ndarray, delta: float, metric: int) -> np.ndarray:
    """Greedy scan packing: select a point iff it is > 2*delta from every
    previously selected center.  metric: 0 Euclidean, 1 max-norm.

    Returns selected indices in scan order.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n, d = points.shape
    t = 2.0 * delta
    t2 = t * t
    inv = 1.0 / t
    cell_idx = np.floor(points * inv).astype(np.int64)
    offsets = list(itertools.product((-1, 0, 1), repeat=d))
    cells: dict[tuple, list[int]] = {}
    selected: list[int] = []
    for i in range(n):
        ci = tuple(cell_idx[i])
        p = points[i]
        ok = True
        for off in offsets:
            bucket = cells.get(tuple(c + o for c, o in zip(ci, off)))
            if not bucket:
                continue
            q = points[bucket]
            diff = q - p
            if metric == 0:
                acc = diff[:, 0] * diff[:, 0]
                for a in range(1, d):
                    acc = acc + diff[:, a] * diff[:, a]
                if np.any(acc <= t2):
                    ok = False
                    break
            else:
                if np.any(np.abs(diff).max(axis=1) <= t):
                    ok = False
                    break
        if ok:
            cells.setdefault(ci, []).append(i)
            selected.append(i)
    return np.asarray(selected, dtype=np.int64)


def box_components(lo: np.ndarray, hi: np.ndarray, eps: float, metric: int) -> np.ndarray:
    """Union-find roots of the graph joining boxes at gap distance <= eps.

    Box gap per axis is max(0, lo_j - hi_i, lo_i - hi_j); metric 0 combines
    axes Euclidean-style, 1 takes the max.  Returns one root id per box.
    Large inputs bin lo-corners into grid cells of side (max box side + eps);
    touching boxes then sit within one cell of each other.
    """
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    n, d = lo.shape
    parent = np.arange(n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union_hits(i: int, others: np.ndarray):
        g = np.maximum(0.0, np.maximum(lo[others] - hi[i], lo[i] - hi[others]))
        if metric == 0:
            acc = g[:, 0] * g[:, 0]
            for a in range(1, d):
                acc = acc + g[:, a] * g[:, a]
            hits = others[acc <= e2]
        else:
            hits = others[g.max(axis=1) <= eps]
        for j in hits:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    e2 = eps * eps
    if n > 512:
        cell = max(eps, float((hi - lo).max()) + eps)
        cells_of = np.floor((lo - lo.min(axis=0)) / cell).astype(np.int64)
        buckets: dict[tuple, list[int]] = {}
        offsets = list(itertools.product((-1, 0, 1), repeat=d))
        for i in range(n):
            ci = tuple(cells_of[i])
            for off in offsets:
                bucket = buckets.get(tuple(c + o for c, o in zip(ci, off)))
                if bucket:
                    union_hits(i, np.asarray(bucket, dtype=np.int64))
            buckets.setdefault(ci, []).append(i)
    else:
        for i in range(n - 1):
            union_hits(i, np.arange(i + 1, n, dtype=np.int64))
    return np.asarray([find(i) for i in range(n)], dtype=np.int64)


def grid_mark_count(
    points: np.ndarray, delta: float, step: float, origin: np.ndarray, dims: np.ndarray
) -> int:
    """Number of grid cells whose center lies within delta of some point.

    Cell j has center origin + (j + 0.5) * step per axis; the grid has
    dims[a] cells along axis a.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n, d = points.shape
    origin = np.asarray(origin, dtype=np.float64)
    dims = np.asarray(dims, dtype=np.int64)
    strides = np.ones(d, dtype=np.int64)
    for a in range(d - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]
    marked = np.zeros(int(dims.prod()), dtype=bool)
    base = np.floor((points - origin) / step).astype(np.int64)
    radius = int(np.floor(delta / step)) + 1
    d2 = delta * delta
    for off in itertools.product(range(-radius, radius + 1), repeat=d):
        j = base + np.asarray(off, dtype=np.int64)
        valid = np.all((j >= 0) & (j < dims), axis=1)
        if not valid.any():
            continue
        centers = origin + (j + 0.5) * step
        diff = centers - points
        acc = diff[:, 0] * diff[:, 0]
        for a in range(1, d):
            acc = acc + diff[:, a] * diff[:, a]
        hit = valid & (acc <= d2)
        if hit.any():
            marked[(j[hit] * strides).sum(axis=1)] = True
    return int(marked.sum())
