# cython: language_level=3
"""Compiled kernels for the hot loops: greedy packing scans, box-graph
components, and grid neighborhood counts.

Must stay output-identical to ``_kernels_py``: same accumulation order,
same comparison sense, same tie behavior.  The only differences are speed
and the neighbor-search bookkeeping, which cannot change results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, floor

cnp.import_array()

BACKEND_NAME = "compiled"

DEF MAX_DIM = 16
# grids beyond this many cells fall back to a plain scan over selected centers
DEF MAX_GRID_CELLS = 16777216


cdef inline bint _within(const double* p, const double* q, Py_ssize_t d,
                         int metric, double t, double t2) noexcept nogil:
    cdef double acc = 0.0
    cdef double diff
    cdef Py_ssize_t a
    if metric == 0:
        for a in range(d):
            diff = q[a] - p[a]
            acc = acc + diff * diff
        return acc <= t2
    for a in range(d):
        diff = fabs(q[a] - p[a])
        if diff > acc:
            acc = diff
    return acc <= t


def pack_greedy(points, double delta, int metric):
    """Greedy scan packing; see the pure-Python twin for the contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode='c'] pts = \
        np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds kernel limit {MAX_DIM}")
    cdef double t = 2.0 * delta
    cdef double t2 = t * t
    cdef double inv = 1.0 / t

    cdef cnp.ndarray[cnp.int64_t, ndim=1] sel = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nsel = 0

    cdef double lo[MAX_DIM]
    cdef double hiv
    cdef cnp.int64_t ncell[MAX_DIM]
    cdef cnp.int64_t stride[MAX_DIM]
    cdef Py_ssize_t a, i, j
    cdef cnp.int64_t total = 1
    cdef bint use_grid = n > 64

    if use_grid:
        for a in range(d):
            lo[a] = pts[0, a]
            hiv = pts[0, a]
            for i in range(1, n):
                if pts[i, a] < lo[a]:
                    lo[a] = pts[i, a]
                if pts[i, a] > hiv:
                    hiv = pts[i, a]
            ncell[a] = <cnp.int64_t>floor((hiv - lo[a]) * inv) + 1
            if total > MAX_GRID_CELLS // ncell[a]:
                use_grid = False
                break
            total = total * ncell[a]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] head
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt
    cdef cnp.int64_t ci[MAX_DIM]
    cdef cnp.int64_t cj[MAX_DIM]
    cdef int off[MAX_DIM]
    cdef cnp.int64_t flat, cur
    cdef bint ok, carry, valid
    cdef double* p

    if use_grid:
        stride[d - 1] = 1
        for a in range(d - 2, -1, -1):
            stride[a] = stride[a + 1] * ncell[a + 1]
        head = np.full(total, -1, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        for i in range(n):
            p = &pts[i, 0]
            for a in range(d):
                ci[a] = <cnp.int64_t>floor((p[a] - lo[a]) * inv)
                off[a] = -1
            ok = True
            while True:
                valid = True
                for a in range(d):
                    cj[a] = ci[a] + off[a]
                    if cj[a] < 0 or cj[a] >= ncell[a]:
                        valid = False
                        break
                if valid:
                    flat = 0
                    for a in range(d):
                        flat += cj[a] * stride[a]
                    cur = head[flat]
                    while cur != -1:
                        if _within(p, &pts[cur, 0], d, metric, t, t2):
                            ok = False
                            break
                        cur = nxt[cur]
                    if not ok:
                        break
                # odometer over the 3^d neighbor offsets
                carry = True
                for a in range(d - 1, -1, -1):
                    if off[a] < 1:
                        off[a] += 1
                        carry = False
                        break
                    off[a] = -1
                if carry:
                    break
            if ok:
                flat = 0
                for a in range(d):
                    flat += (<cnp.int64_t>floor((p[a] - lo[a]) * inv)) * stride[a]
                nxt[i] = head[flat]
                head[flat] = i
                sel[nsel] = i
                nsel += 1
    else:
        for i in range(n):
            p = &pts[i, 0]
            ok = True
            for j in range(nsel):
                if _within(p, &pts[sel[j], 0], d, metric, t, t2):
                    ok = False
                    break
            if ok:
                sel[nsel] = i
                nsel += 1
    return np.ascontiguousarray(sel[:nsel])


cdef cnp.int64_t _find(cnp.int64_t* parent, cnp.int64_t x) noexcept nogil:
    cdef cnp.int64_t root = x
    cdef cnp.int64_t tmp
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        tmp = parent[x]
        parent[x] = root
        x = tmp
    return root


cdef inline bint _boxes_near(const double* lo, const double* hi, Py_ssize_t d,
                             Py_ssize_t i, Py_ssize_t j, int metric,
                             double eps, double e2) noexcept nogil:
    cdef double g, gi, gj, acc = 0.0
    cdef Py_ssize_t a
    for a in range(d):
        gi = lo[j * d + a] - hi[i * d + a]
        gj = lo[i * d + a] - hi[j * d + a]
        g = gi if gi > gj else gj
        if g < 0.0:
            g = 0.0
        if metric == 0:
            acc = acc + g * g
            if acc > e2:
                return False
        else:
            if g > eps:
                return False
    return True


def box_components(lo_in, hi_in, double eps, int metric):
    """Union-find roots over the box-gap graph; see the pure-Python twin.

    Boxes whose lo-corners fall into grid cells of side (max box side + eps)
    can only touch within a one-cell neighborhood, so large inputs use a
    chained grid instead of the quadratic pair scan.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode='c'] lo = \
        np.ascontiguousarray(lo_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode='c'] hi = \
        np.ascontiguousarray(hi_in, dtype=np.float64)
    cdef Py_ssize_t n = lo.shape[0]
    cdef Py_ssize_t d = lo.shape[1]
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds kernel limit {MAX_DIM}")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t* par = &parent[0]
    cdef double e2 = eps * eps
    cdef Py_ssize_t i, j, a
    cdef cnp.int64_t ri, rj

    cdef double cell = eps
    cdef double lo_min[MAX_DIM]
    cdef double lo_max[MAX_DIM]
    cdef double side
    cdef cnp.int64_t ncell[MAX_DIM]
    cdef cnp.int64_t stride[MAX_DIM]
    cdef cnp.int64_t total = 1
    cdef bint use_grid = n > 512
    if use_grid:
        for a in range(d):
            lo_min[a] = lo[0, a]
            lo_max[a] = lo[0, a]
        for i in range(n):
            for a in range(d):
                if lo[i, a] < lo_min[a]:
                    lo_min[a] = lo[i, a]
                if lo[i, a] > lo_max[a]:
                    lo_max[a] = lo[i, a]
                side = hi[i, a] - lo[i, a]
                if side + eps > cell:
                    cell = side + eps
        for a in range(d):
            ncell[a] = <cnp.int64_t>floor((lo_max[a] - lo_min[a]) / cell) + 1
            if total > MAX_GRID_CELLS // ncell[a]:
                use_grid = False
                break
            total = total * ncell[a]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] head
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt
    cdef cnp.int64_t ci[MAX_DIM]
    cdef cnp.int64_t cj[MAX_DIM]
    cdef int off[MAX_DIM]
    cdef cnp.int64_t flat, cur
    cdef bint carry, valid

    if use_grid:
        stride[d - 1] = 1
        for a in range(d - 2, -1, -1):
            stride[a] = stride[a + 1] * ncell[a + 1]
        head = np.full(total, -1, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        for i in range(n):
            for a in range(d):
                ci[a] = <cnp.int64_t>floor((lo[i, a] - lo_min[a]) / cell)
                off[a] = -1
            while True:
                valid = True
                for a in range(d):
                    cj[a] = ci[a] + off[a]
                    if cj[a] < 0 or cj[a] >= ncell[a]:
                        valid = False
                        break
                if valid:
                    flat = 0
                    for a in range(d):
                        flat += cj[a] * stride[a]
                    cur = head[flat]
                    while cur != -1:
                        if _boxes_near(&lo[0, 0], &hi[0, 0], d, i, cur, metric, eps, e2):
                            ri = _find(par, i)
                            rj = _find(par, cur)
                            if ri != rj:
                                if ri < rj:
                                    par[rj] = ri
                                else:
                                    par[ri] = rj
                        cur = nxt[cur]
                carry = True
                for a in range(d - 1, -1, -1):
                    if off[a] < 1:
                        off[a] += 1
                        carry = False
                        break
                    off[a] = -1
                if carry:
                    break
            flat = 0
            for a in range(d):
                flat += ci[a] * stride[a]
            nxt[i] = head[flat]
            head[flat] = i
    else:
        with nogil:
            for i in range(n - 1):
                for j in range(i + 1, n):
                    if _boxes_near(&lo[0, 0], &hi[0, 0], d, i, j, metric, eps, e2):
                        ri = _find(par, i)
                        rj = _find(par, j)
                        if ri != rj:
                            if ri < rj:
                                par[rj] = ri
                            else:
                                par[ri] = rj
    out = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_v = out
    for i in range(n):
        out_v[i] = _find(par, i)
    return out


def grid_mark_count(points, double delta, double step, origin, dims):
    """Count grid cells whose center is within delta of some point."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode='c'] pts = \
        np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] org = \
        np.ascontiguousarray(origin, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dim = \
        np.ascontiguousarray(dims, dtype=np.int64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds kernel limit {MAX_DIM}")
    cdef cnp.int64_t total = 1
    cdef Py_ssize_t a
    for a in range(d):
        total *= dim[a]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] marked = np.zeros(total, dtype=np.uint8)
    cdef cnp.int64_t stride[MAX_DIM]
    stride[d - 1] = 1
    for a in range(d - 2, -1, -1):
        stride[a] = stride[a + 1] * dim[a + 1]
    cdef cnp.int64_t radius = <cnp.int64_t>floor(delta / step) + 1
    cdef double d2 = delta * delta
    cdef cnp.int64_t base[MAX_DIM]
    cdef cnp.int64_t j[MAX_DIM]
    cdef cnp.int64_t o[MAX_DIM]
    cdef Py_ssize_t i
    cdef cnp.int64_t flat
    cdef double acc, diff, center
    cdef bint valid, carry
    with nogil:
        for i in range(n):
            for a in range(d):
                base[a] = <cnp.int64_t>floor((pts[i, a] - org[a]) / step)
                o[a] = -radius
            while True:
                valid = True
                for a in range(d):
                    j[a] = base[a] + o[a]
                    if j[a] < 0 or j[a] >= dim[a]:
                        valid = False
                        break
                if valid:
                    acc = 0.0
                    for a in range(d):
                        center = org[a] + (j[a] + 0.5) * step
                        diff = center - pts[i, a]
                        acc = acc + diff * diff
                    if acc <= d2:
                        flat = 0
                        for a in range(d):
                            flat += j[a] * stride[a]
                        marked[flat] = 1
                carry = True
                for a in range(d - 1, -1, -1):
                    if o[a] < radius:
                        o[a] += 1
                        carry = False
                        break
                    o[a] = -radius
                if carry:
                    break
    cdef cnp.int64_t count = 0
    for flat in range(total):
        if marked[flat]:
            count += 1
    return int(count)
