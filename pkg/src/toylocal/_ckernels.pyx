# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract as ``toylocal._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int64_t, uint64_t
from libc.stdlib cimport calloc, free

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t SPAWN_SALT = 0x632BE59BD9B4E019ULL

COLUMN_OK = 0
DUPLICATE_ROW = 1
SINGLE_VALUED = 2
BELOW_QUARTER = 3

TABLE_OK = 0
TABLE_OVERLAP = 1
TABLE_MISSING = 2

TELEPORT_FIELDS = ("x", "pair_outcome", "y", "alice_outcome", "p1_post", "p2_post", "final3")


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _derive(uint64_t key, uint64_t index) nogil:
    return _mix64(key ^ _mix64(index * GAMMA + SPAWN_SALT))


cdef inline int _randbelow(uint64_t key, uint64_t* counter, uint64_t n) nogil:
    # limit = 2**64 - (2**64 % n), computed without 128-bit arithmetic
    cdef uint64_t rem = (<uint64_t>0 - n) % n
    cdef uint64_t v
    while True:
        counter[0] += 1
        v = _mix64(key + counter[0] * GAMMA)
        if rem == 0 or v < <uint64_t>0 - rem:
            return <int>(v % n)


def encode_rows(rows):
    cdef cnp.ndarray[int64_t, ndim=2] a = np.ascontiguousarray(rows, dtype=np.int64)
    cdef Py_ssize_t i, j, L = a.shape[0], N = a.shape[1]
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(L, dtype=np.int64)
    cdef int64_t c
    for i in range(L):
        c = 0
        for j in range(N):
            c = c * 4 + a[i, j]
        out[i] = c
    return out


def column_check(rows):
    cdef cnp.ndarray[int64_t, ndim=2] a = np.ascontiguousarray(rows, dtype=np.int64)
    cdef Py_ssize_t L = a.shape[0], N = a.shape[1]
    cdef Py_ssize_t i, j, v
    cdef int64_t c
    cdef int64_t counts[4]
    cdef int distinct
    cdef unsigned char* seen
    if N > 16:
        raise ValueError("kernels support at most 16 particles")
    seen = <unsigned char*>calloc(<size_t>1 << (2 * N), 1)
    if seen == NULL:
        raise MemoryError()
    try:
        for i in range(L):
            c = 0
            for j in range(N):
                c = c * 4 + a[i, j]
            if seen[c]:
                return DUPLICATE_ROW, i
            seen[c] = 1
    finally:
        free(seen)
    for j in range(N):
        counts[0] = counts[1] = counts[2] = counts[3] = 0
        for i in range(L):
            counts[a[i, j]] += 1
        distinct = 0
        for v in range(4):
            if counts[v]:
                distinct += 1
        if distinct < 2:
            return SINGLE_VALUED, j
        for v in range(4):
            if counts[v] and 4 * counts[v] < L:
                return BELOW_QUARTER, j
    return COLUMN_OK, -1


def outcome_table(codes, labels, Py_ssize_t n_states):
    cdef cnp.ndarray[int64_t, ndim=1] cs = np.ascontiguousarray(codes, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ls = np.ascontiguousarray(labels, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] table = np.full(n_states, -1, dtype=np.int64)
    cdef Py_ssize_t i, n = cs.shape[0]
    cdef int64_t c, prev
    for i in range(n):
        c = cs[i]
        prev = table[c]
        if prev != -1:
            return table, TABLE_OVERLAP, c, prev, ls[i]
        table[c] = ls[i]
    for i in range(n_states):
        if table[i] == -1:
            return table, TABLE_MISSING, i, -1, -1
    return table, TABLE_OK, -1, -1, -1


def teleport_batch(key, Py_ssize_t trials):
    cdef uint64_t k0 = <uint64_t>(int(key) & 0xFFFFFFFFFFFFFFFF)
    cdef cnp.ndarray[int8_t, ndim=2] out = np.empty((trials, 7), dtype=np.int8)
    cdef Py_ssize_t i
    cdef uint64_t k, ctr
    cdef int x, a, b, pair_r, y, r, row
    with nogil:
        for i in range(trials):
            k = _derive(k0, <uint64_t>i)
            ctr = 0
            x = _randbelow(k, &ctr, 4)
            a = _randbelow(k, &ctr, 4)
            b = _randbelow(k, &ctr, 4)
            pair_r = (a - b + 4) % 4
            y = _randbelow(k, &ctr, 4)
            r = (x - y + 4) % 4
            row = _randbelow(k, &ctr, 4)
            out[i, 0] = x
            out[i, 1] = pair_r
            out[i, 2] = y
            out[i, 3] = r
            out[i, 4] = row
            out[i, 5] = (row - r + 4) % 4
            out[i, 6] = (y + r) % 4
    return out
