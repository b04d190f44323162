# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: trigram feature hashing and cosine scan.

Semantics match ``_fallback`` exactly; see that module for the contract.
"""

from libc.stdint cimport uint32_t, uint64_t, int64_t

cdef uint64_t FNV_OFFSET = <uint64_t> 0xCBF29CE484222325
cdef uint64_t FNV_PRIME = <uint64_t> 0x100000001B3


def trigram_counts(const uint32_t[::1] codepoints, int64_t[::1] out):
    """Accumulate FNV-1a bucket counts of 3-codepoint windows into ``out``."""
    cdef Py_ssize_t n = codepoints.shape[0]
    cdef Py_ssize_t dim = out.shape[0]
    cdef Py_ssize_t i, j, width
    cdef int shift
    cdef uint64_t h, v
    if n == 0:
        return
    width = 3 if n >= 3 else n
    for i in range(n - width + 1):
        h = FNV_OFFSET
        for j in range(width):
            v = <uint64_t> codepoints[i + j]
            for shift in range(0, 32, 8):
                h = (h ^ ((v >> shift) & <uint64_t> 0xFF)) * FNV_PRIME
        out[<Py_ssize_t> (h % <uint64_t> dim)] += 1


def dot_scores(const double[:, ::1] matrix, const double[::1] query, double[::1] out):
    """Row-wise dot products of ``matrix`` against ``query`` into ``out``."""
    cdef Py_ssize_t rows = matrix.shape[0]
    cdef Py_ssize_t cols = matrix.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(rows):
        acc = 0.0
        for j in range(cols):
            acc += matrix[i, j] * query[j]
        out[i] = acc
