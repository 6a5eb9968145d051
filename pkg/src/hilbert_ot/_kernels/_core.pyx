# cython: language_level=3
"""Compiled kernels: Hilbert codec and the north-west corner sweep.

Mirrors hilbert_ot._kernels._fallback bit for bit; 128-bit keys are carried
in an unsigned __int128 internally and returned as (hi, lo) uint64 pairs.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"

BACKEND_NAME = "compiled"

NW_TIE_TOL = 1e-12

cdef double _NW_TIE_TOL = 1e-12


cdef inline uint128 _mask(int dims) noexcept nogil:
    cdef uint128 one = 1
    if dims >= 128:
        return <uint128>(-1)
    return (one << dims) - 1


cdef inline uint128 _rotate_right(uint128 x, int r, int dims) noexcept nogil:
    r %= dims
    if r == 0:
        return x & _mask(dims)
    return ((x >> r) | (x << (dims - r))) & _mask(dims)


cdef inline uint128 _rotate_left(uint128 x, int r, int dims) noexcept nogil:
    return _rotate_right(x, dims - (r % dims), dims)


cdef inline uint128 _gray(uint128 i) noexcept nogil:
    return i ^ (i >> 1)


cdef inline uint128 _gray_inverse(uint128 g) noexcept nogil:
    cdef uint128 i = g
    cdef int j = 1
    while (g >> j) > 0:
        i ^= g >> j
        j += 1
    return i


cdef inline int _trailing_ones(uint128 i) noexcept nogil:
    cdef int c = 0
    while i & 1:
        c += 1
        i >>= 1
    return c


cdef inline uint128 _entry(uint128 w) noexcept nogil:
    cdef uint128 ww
    if w == 0:
        return 0
    ww = 2 * ((w - 1) / 2)
    return ww ^ (ww >> 1)


cdef inline int _intra_direction(uint128 w, int dims) noexcept nogil:
    if w == 0:
        return 0
    if w % 2 == 0:
        return _trailing_ones(w - 1) % dims
    return _trailing_ones(w) % dims


def encode_cells(cnp.ndarray[cnp.uint64_t, ndim=2] cells, int order):
    """Hilbert keys of grid cells; see the fallback docstring."""
    cdef Py_ssize_t n = cells.shape[0]
    cdef int dims = <int>cells.shape[1]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] hi = np.empty(n, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] lo = np.empty(n, dtype=np.uint64)
    cdef uint64_t[:, ::1] cv = np.ascontiguousarray(cells)
    cdef uint64_t[::1] hv = hi
    cdef uint64_t[::1] lv = lo
    cdef Py_ssize_t row
    cdef int level, j, axis
    cdef uint128 key, e, label, w, one = 1
    with nogil:
        for row in range(n):
            key = 0
            e = 0
            axis = 0
            for level in range(order - 1, -1, -1):
                label = 0
                for j in range(dims):
                    label |= ((<uint128>(cv[row, j] >> level)) & 1) << j
                label = _rotate_right(label ^ e, axis + 1, dims)
                w = _gray_inverse(label)
                key = (key << dims) | w
                e = e ^ _rotate_left(_entry(w), axis + 1, dims)
                axis = (axis + _intra_direction(w, dims) + 1) % dims
            hv[row] = <uint64_t>(key >> 64)
            lv[row] = <uint64_t>key
    return hi, lo


def decode_keys(cnp.ndarray[cnp.uint64_t, ndim=1] hi,
                cnp.ndarray[cnp.uint64_t, ndim=1] lo,
                int dims, int order):
    """Grid cells of Hilbert keys; inverse of :func:`encode_cells`."""
    cdef Py_ssize_t n = hi.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] cells = np.zeros((n, dims), dtype=np.uint64)
    cdef uint64_t[::1] hv = np.ascontiguousarray(hi)
    cdef uint64_t[::1] lv = np.ascontiguousarray(lo)
    cdef uint64_t[:, ::1] cv = cells
    cdef Py_ssize_t row
    cdef int level, j, axis
    cdef uint128 key, e, label, w
    with nogil:
        for row in range(n):
            key = ((<uint128>hv[row]) << 64) | (<uint128>lv[row])
            e = 0
            axis = 0
            for level in range(order - 1, -1, -1):
                w = (key >> (level * dims)) & _mask(dims)
                label = _rotate_left(_gray(w), axis + 1, dims) ^ e
                for j in range(dims):
                    cv[row, j] |= (<uint64_t>((label >> j) & 1)) << level
                e = e ^ _rotate_left(_entry(w), axis + 1, dims)
                axis = (axis + _intra_direction(w, dims) + 1) % dims
    return cells


def northwest(cnp.ndarray[cnp.float64_t, ndim=1] a,
              cnp.ndarray[cnp.float64_t, ndim=1] b):
    """North-west corner sweep; see the fallback docstring."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows = np.empty(m + n - 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols = np.empty(m + n - 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mass = np.empty(m + n - 1, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(a)
    cdef double[::1] bv = np.ascontiguousarray(b)
    cdef int64_t[::1] rv = rows
    cdef int64_t[::1] cv = cols
    cdef double[::1] mv = mass
    cdef Py_ssize_t i = 0, j = 0, pos = 0
    cdef double ra = av[0]
    cdef double rb = bv[0]
    cdef double diff
    cdef bint last_i, last_j
    with nogil:
        while True:
            last_i = i == m - 1
            last_j = j == n - 1
            if last_i and last_j:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = 0.5 * (ra + rb)
                pos += 1
                break
            if last_i:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = rb
                pos += 1
                ra -= rb
                j += 1
                rb = bv[j]
                continue
            if last_j:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = ra
                pos += 1
                rb -= ra
                i += 1
                ra = av[i]
                continue
            diff = ra - rb
            if -_NW_TIE_TOL <= diff <= _NW_TIE_TOL:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = ra if ra < rb else rb
                pos += 1
                i += 1
                j += 1
                ra = av[i]
                rb = bv[j]
            elif diff > 0.0:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = rb
                pos += 1
                ra = diff
                j += 1
                rb = bv[j]
            else:
                rv[pos] = i
                cv[pos] = j
                mv[pos] = ra
                pos += 1
                rb = -diff
                i += 1
                ra = av[i]
    return rows[:pos].copy(), cols[:pos].copy(), mass[:pos].copy()
