# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cut-evaluation kernels (hot inner loops).

Must stay semantically identical to _kernels_py: same loop order and the
same sequential accumulation, so values are bit-identical across backends.
"""


def cut_value(long[::1] eu, long[::1] ev, double[::1] ew, unsigned char[::1] mask):
    cdef Py_ssize_t i, m = eu.shape[0]
    cdef double total = 0.0
    for i in range(m):
        if mask[eu[i]] != mask[ev[i]]:
            total += ew[i]
    return total


def cut_deltas(long[::1] indptr, long[::1] nbrs, double[::1] nws,
               unsigned char[::1] mask, long[::1] xs, double[::1] out):
    cdef Py_ssize_t j, idx, x, n = xs.shape[0]
    cdef double acc
    for j in range(n):
        x = xs[j]
        acc = 0.0
        for idx in range(indptr[x], indptr[x + 1]):
            if mask[nbrs[idx]]:
                acc -= nws[idx]
            else:
                acc += nws[idx]
        out[j] = acc


def cut_scan_first(long[::1] indptr, long[::1] nbrs, double[::1] nws,
                   unsigned char[::1] mask, long[::1] xs, double tau):
    cdef Py_ssize_t j, idx, x, n = xs.shape[0]
    cdef double acc
    for j in range(n):
        x = xs[j]
        acc = 0.0
        for idx in range(indptr[x], indptr[x + 1]):
            if mask[nbrs[idx]]:
                acc -= nws[idx]
            else:
                acc += nws[idx]
        if acc >= tau:
            return j
    return -1
