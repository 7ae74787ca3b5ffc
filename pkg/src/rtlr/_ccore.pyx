# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled reachability kernels; same contracts as ``rtlr._pycore``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()

BACKEND = "cython"

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _EDGE_MUL = 0xD1B54A32D192ED03ULL


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t seed, uint64_t trial, uint64_t edge) nogil:
    cdef uint64_t z = _mix64(seed + _GOLDEN * (trial + 1))
    z = _mix64(z ^ ((edge + 1) * _EDGE_MUL))
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


def uniform(seed, trial, edge):
    return _uniform(<uint64_t>seed, <uint64_t>trial, <uint64_t>edge)


cdef inline int32_t _push_bonus(int32_t x, const int32_t[::1] bsrc, const int32_t[::1] bdst,
                                int32_t[::1] seen, int32_t stamp, const uint8_t* row,
                                int32_t[::1] queue, int32_t tail) nogil:
    cdef Py_ssize_t b
    cdef int32_t y
    for b in range(bsrc.shape[0]):
        if bsrc[b] == x:
            y = bdst[b]
            if seen[y] != stamp and (row == NULL or row[y] == 0):
                seen[y] = stamp
                queue[tail] = y
                tail += 1
    return tail


cdef int32_t _bfs(const int64_t* ip, const int32_t[::1] ix, int32_t[::1] starts,
                  const int32_t[::1] bsrc, const int32_t[::1] bdst,
                  int32_t[::1] seen, int32_t stamp, const uint8_t* row,
                  int32_t[::1] queue) nogil:
    """BFS from ``starts``; vertices with row[y] != 0 are blocked. Returns the
    number visited; visited ids are queue[0:ret]."""
    cdef int32_t head = 0, tail = 0, x, y
    cdef int64_t k
    cdef Py_ssize_t i
    cdef bint has_bonus = bsrc.shape[0] > 0
    for i in range(starts.shape[0]):
        x = starts[i]
        if seen[x] != stamp and (row == NULL or row[x] == 0):
            seen[x] = stamp
            queue[tail] = x
            tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(ip[x], ip[x + 1]):
            y = ix[k]
            if seen[y] != stamp and (row == NULL or row[y] == 0):
                seen[y] = stamp
                queue[tail] = y
                tail += 1
        if has_bonus:
            tail = _push_bonus(x, bsrc, bdst, seen, stamp, row, queue, tail)
    return tail


cdef inline int32_t[::1] _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def reach_mask(const int64_t[::1] indptr, const int32_t[::1] indices, sources):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] starts = _i32(sources)
    cdef int32_t[::1] empty = np.empty(0, dtype=np.int32)
    with nogil:
        _bfs(&indptr[0], indices, starts, empty, empty, seen, 1, NULL, queue)
    return np.asarray(seen).astype(np.uint8)


def sketch_reach_counts(const int64_t[:, ::1] sk_indptr, const int32_t[::1] sk_indices,
                        sources, bonus_src, bonus_dst):
    cdef Py_ssize_t theta = sk_indptr.shape[0], n = sk_indptr.shape[1] - 1, j
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] starts = _i32(sources)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    out = np.zeros(theta, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for j in range(theta):
            o[j] = _bfs(&sk_indptr[j, 0], sk_indices, starts, bsrc, bdst,
                        seen, <int32_t>(j + 1), NULL, queue)
    return out


def probe_gains(const int64_t[:, ::1] sk_indptr, const int32_t[::1] sk_indices,
                const uint8_t[:, ::1] marks, probe_src, probe_dst, bonus_src, bonus_dst):
    cdef Py_ssize_t theta = sk_indptr.shape[0], n = sk_indptr.shape[1] - 1, j, p
    cdef Py_ssize_t P = len(probe_src)
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] start = np.empty(1, dtype=np.int32)
    cdef int32_t[::1] ps = _i32(probe_src)
    cdef int32_t[::1] pd = _i32(probe_dst)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    cdef int32_t stamp = 0, u, v
    out = np.zeros(P, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for p in range(P):
            u, v = ps[p], pd[p]
            start[0] = v
            if stamp > 2000000000 - theta:
                seen[:] = 0
                stamp = 0
            for j in range(theta):
                if marks[j, u] != 0 and marks[j, v] == 0:
                    stamp += 1
                    o[p] += _bfs(&sk_indptr[j, 0], sk_indices, start, bsrc, bdst,
                                 seen, stamp, &marks[j, 0], queue)
    return out


def mark_sources(const int64_t[:, ::1] sk_indptr, const int32_t[::1] sk_indices,
                 uint8_t[:, ::1] marks, sources, bonus_src, bonus_dst):
    cdef Py_ssize_t theta = sk_indptr.shape[0], n = sk_indptr.shape[1] - 1, j, i
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] starts = _i32(sources)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    cdef int32_t hit
    cdef int64_t total = 0
    with nogil:
        for j in range(theta):
            hit = _bfs(&sk_indptr[j, 0], sk_indices, starts, bsrc, bdst,
                       seen, <int32_t>(j + 1), &marks[j, 0], queue)
            for i in range(hit):
                marks[j, queue[i]] = 1
            total += hit
    return total


def marginal_counts(const int64_t[:, ::1] sk_indptr, const int32_t[::1] sk_indices,
                    const uint8_t[:, ::1] marks, int32_t u, int32_t v,
                    bonus_src, bonus_dst, bint with_total):
    cdef Py_ssize_t theta = sk_indptr.shape[0], n = sk_indptr.shape[1] - 1, j
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] start = np.array([v], dtype=np.int32)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    cdef int32_t[::1] empty = np.empty(0, dtype=np.int32)
    cdef int64_t count = 0, count_total = 0
    cdef int32_t stamp = 0
    with nogil:
        for j in range(theta):
            if marks[j, u] != 0 and marks[j, v] == 0:
                stamp += 1
                count += _bfs(&sk_indptr[j, 0], sk_indices, start, bsrc, bdst,
                              seen, stamp, &marks[j, 0], queue)
            if with_total:
                stamp += 1
                count_total += _bfs(&sk_indptr[j, 0], sk_indices, start, empty, empty,
                                    seen, stamp, NULL, queue)
    return count, count_total


def mark_edge(const int64_t[:, ::1] sk_indptr, const int32_t[::1] sk_indices,
              uint8_t[:, ::1] marks, int32_t u, int32_t v, bonus_src, bonus_dst,
              uint8_t[::1] newly):
    cdef Py_ssize_t theta = sk_indptr.shape[0], n = sk_indptr.shape[1] - 1, j, i
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] start = np.array([v], dtype=np.int32)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    cdef int32_t hit, y
    cdef int64_t total = 0
    with nogil:
        for j in range(theta):
            if marks[j, u] == 0 or marks[j, v] != 0:
                continue
            hit = _bfs(&sk_indptr[j, 0], sk_indices, start, bsrc, bdst,
                       seen, <int32_t>(j + 1), &marks[j, 0], queue)
            for i in range(hit):
                y = queue[i]
                marks[j, y] = 1
                newly[y] = 1
            total += hit
    return total


def ic_counts(const int64_t[::1] indptr, const int32_t[::1] indices, const double[::1] prob,
              sources, bonus_src, bonus_dst, seed, trial0, Py_ssize_t ntrials):
    cdef Py_ssize_t n = indptr.shape[0] - 1, i, s
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] starts = _i32(sources)
    cdef int32_t[::1] bsrc = _i32(bonus_src)
    cdef int32_t[::1] bdst = _i32(bonus_dst)
    cdef uint64_t useed = <uint64_t>seed, t0 = <uint64_t>trial0
    cdef int32_t head, tail, x, y, stamp
    cdef int64_t k
    cdef bint has_bonus = bsrc.shape[0] > 0
    out = np.zeros(ntrials, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(ntrials):
            stamp = <int32_t>(i + 1)
            head = 0
            tail = 0
            for s in range(starts.shape[0]):
                x = starts[s]
                if seen[x] != stamp:
                    seen[x] = stamp
                    queue[tail] = x
                    tail += 1
            while head < tail:
                x = queue[head]
                head += 1
                for k in range(indptr[x], indptr[x + 1]):
                    y = indices[k]
                    if seen[y] != stamp and _uniform(useed, t0 + i, <uint64_t>k) < prob[k]:
                        seen[y] = stamp
                        queue[tail] = y
                        tail += 1
                if has_bonus:
                    tail = _push_bonus(x, bsrc, bdst, seen, stamp, NULL, queue, tail)
            o[i] = tail
    return out


def reverse_flags(const int64_t[:, ::1] sk_rindptr, const int32_t[::1] sk_rindices,
                  const uint8_t[:, ::1] marks, int32_t target, int32_t through,
                  bonus_src, bonus_dst,
                  uint8_t[:, ::1] flags):
    cdef Py_ssize_t theta = sk_rindptr.shape[0], n = sk_rindptr.shape[1] - 1, j, i
    cdef int32_t[::1] seen = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] start = np.array([target], dtype=np.int32)
    # reversed bonus edges: dst -> src
    cdef int32_t[::1] rsrc = _i32(bonus_dst)
    cdef int32_t[::1] rdst = _i32(bonus_src)
    cdef int32_t hit
    cdef int64_t scanned = 0
    with nogil:
        for j in range(theta):
            if marks[j, target] != 0 or marks[j, through] != 0:
                continue
            scanned += 1
            hit = _bfs(&sk_rindptr[j, 0], sk_rindices, start, rsrc, rdst,
                       seen, <int32_t>(j + 1), &marks[j, 0], queue)
            for i in range(hit):
                flags[j, queue[i]] = 1
    return scanned
