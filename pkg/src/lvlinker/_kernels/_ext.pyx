# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled query kernels over the dataset's columnar index.

Mirrors _py.py; inputs are buffer objects (array('q') timestamps,
array('i') value codes, bytes/bytearray masks).
"""

from cpython.bytearray cimport PyByteArray_AS_STRING
from libc.string cimport memset

from array import array

BACKEND = "compiled"


def predecessor(const long long[:] ts, long long t):
    cdef Py_ssize_t lo = 0, hi = ts.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if ts[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


def predecessor_in(const long long[:] ts, const long long[:] ids, long long t):
    cdef Py_ssize_t lo = 0, hi = ids.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if ts[ids[mid]] <= t:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


def span(const long long[:] ts, long long lo_ms, long long hi_ms):
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:  # leftmost index with ts >= lo_ms
        mid = (lo + hi) >> 1
        if ts[mid] < lo_ms:
            lo = mid + 1
        else:
            hi = mid
    cdef Py_ssize_t first = lo
    lo = first
    hi = n
    while lo < hi:  # leftmost index with ts >= hi_ms
        mid = (lo + hi) >> 1
        if ts[mid] < hi_ms:
            lo = mid + 1
        else:
            hi = mid
    if first > lo - 1:
        return (-1, -1)
    return (first, lo - 1)


def mask_from_codes(const int[:] codes, const unsigned char[:] table, int missing):
    cdef Py_ssize_t i, n = codes.shape[0]
    cdef bytearray out = bytearray(n)
    cdef unsigned char* buf = <unsigned char*> PyByteArray_AS_STRING(out)
    cdef unsigned char miss = 1 if missing else 0
    cdef int c
    for i in range(n):
        c = codes[i]
        buf[i] = miss if c < 0 else table[c]
    return out


def and_mask(unsigned char[:] acc, const unsigned char[:] mask):
    cdef Py_ssize_t i, n = acc.shape[0]
    for i in range(n):
        if mask[i] == 0:
            acc[i] = 0


def selected_ids(const unsigned char[:] mask):
    cdef Py_ssize_t i, n = mask.shape[0]
    cdef Py_ssize_t count = 0
    for i in range(n):
        if mask[i]:
            count += 1
    out = array("q", bytes(8 * count))
    cdef long long[:] view = out
    cdef Py_ssize_t j = 0
    for i in range(n):
        if mask[i]:
            view[j] = i
            j += 1
    return out


def seen_codes(const int[:] codes, const unsigned char[:] gate, Py_ssize_t n_values):
    cdef bytearray seen = bytearray(n_values)
    cdef unsigned char* buf = <unsigned char*> PyByteArray_AS_STRING(seen)
    memset(buf, 0, n_values)
    cdef Py_ssize_t i, n = codes.shape[0]
    cdef int c
    for i in range(n):
        c = codes[i]
        if c >= 0 and gate[i]:
            buf[c] = 1
    return seen
