# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled counterparts of ``_pykernels``; identical semantics, int64 only."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline bint _dom(const int64_t[:, :] m, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t j
    cdef bint strict = False
    for j in range(m.shape[1]):
        if m[a, j] < m[b, j]:
            return False
        if m[a, j] > m[b, j]:
            strict = True
    return strict


cdef bint _matches(const int64_t[:, :] m, const unsigned char[:] target) nogil:
    cdef Py_ssize_t a, b, k = m.shape[0]
    cdef bint dominated
    for b in range(k):
        dominated = False
        for a in range(k):
            if a != b and _dom(m, a, b):
                dominated = True
                break
        if dominated == (target[b] != 0):
            return False
    return True


def dominates_rows(ra, rb):
    cdef const int64_t[:, :] m = np.ascontiguousarray(np.vstack([ra, rb]), dtype=np.int64)
    return _dom(m, 0, 1)


def nondominated(mat):
    cdef const int64_t[:, :] m = np.ascontiguousarray(mat, dtype=np.int64)
    cdef Py_ssize_t a, b, k = m.shape[0]
    out = []
    for b in range(k):
        for a in range(k):
            if a != b and _dom(m, a, b):
                break
        else:
            out.append(b)
    return out


def feasible_cost_vectors(base, cost_cells, free_cells, grid, target):
    cdef int64_t[:, :] m = np.array(base, dtype=np.int64, copy=True)
    cdef const int64_t[:, :] b0 = np.ascontiguousarray(base, dtype=np.int64)
    cdef const int64_t[:] gv = np.ascontiguousarray(grid, dtype=np.int64)
    cdef const unsigned char[:] tv = np.ascontiguousarray(target, dtype=np.uint8)
    cells = list(cost_cells) + list(free_cells)
    cdef Py_ssize_t p = len(cost_cells), q = len(free_cells), n = p + q
    cdef Py_ssize_t g = gv.shape[0]
    cdef int64_t[:, :] cv = np.zeros((max(n, 1), 2), dtype=np.int64)
    cdef int64_t[:] idx = np.zeros(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t t, r, c
    cdef bint done_cost, done_free, ok
    for t in range(n):
        cv[t, 0] = cells[t][0]
        cv[t, 1] = cells[t][1]
    found = []
    if g == 0:
        return found
    done_cost = False
    while not done_cost:
        for t in range(p):
            r = cv[t, 0]; c = cv[t, 1]
            m[r, c] = b0[r, c] + gv[idx[t]]
        for t in range(p, n):
            idx[t] = 0
        done_free = False
        ok = False
        while not done_free:
            for t in range(p, n):
                r = cv[t, 0]; c = cv[t, 1]
                m[r, c] = b0[r, c] + gv[idx[t]]
            if _matches(m, tv):
                ok = True
                break
            # odometer over the free cells, last cell fastest
            t = n - 1
            while t >= p:
                idx[t] += 1
                if idx[t] < g:
                    break
                idx[t] = 0
                t -= 1
            if t < p:
                done_free = True
        if ok:
            found.append(tuple(int(idx[t]) for t in range(n)))
        t = p - 1
        while t >= 0:
            idx[t] += 1
            if idx[t] < g:
                break
            idx[t] = 0
            t -= 1
        if t < 0:
            done_cost = True
    return found
