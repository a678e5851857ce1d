# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels.

Mirrors ``_kernels_py`` exactly; see that module for the conventions.
"""
import numpy as np


cdef int _nbits(Py_ssize_t dim) except -1:
    cdef int nbits = 0
    while (<Py_ssize_t>1 << nbits) < dim:
        nbits += 1
    if (<Py_ssize_t>1 << nbits) != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return nbits


cdef void _check_pair(int s, int t, int nbits) except *:
    if s == t or s < 0 or t < 0 or s >= nbits or t >= nbits:
        raise ValueError(f"invalid qubit pair ({s}, {t}) for {nbits} qubits")


cdef void _pair_kernel(const double complex[::1] src, double complex[::1] dst,
                       Py_ssize_t dim, int s, int t,
                       const double complex[:, ::1] m) noexcept nogil:
    cdef Py_ssize_t ms = (<Py_ssize_t>1) << s
    cdef Py_ssize_t mt = (<Py_ssize_t>1) << t
    cdef Py_ssize_t base, idx[4]
    cdef double complex a0, a1, a2, a3
    cdef int r
    for base in range(dim):
        if base & ms or base & mt:
            continue
        idx[0] = base
        idx[1] = base | ms
        idx[2] = base | mt
        idx[3] = base | ms | mt
        a0 = src[idx[0]]
        a1 = src[idx[1]]
        a2 = src[idx[2]]
        a3 = src[idx[3]]
        for r in range(4):
            dst[idx[r]] = m[r, 0] * a0 + m[r, 1] * a1 + m[r, 2] * a2 + m[r, 3] * a3


def apply_pair(state, int s, int t, matrix):
    cdef const double complex[::1] src = np.ascontiguousarray(state, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(matrix, dtype=np.complex128)
    cdef Py_ssize_t dim = src.shape[0]
    _check_pair(s, t, _nbits(dim))
    out = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] dst = out
    with nogil:
        _pair_kernel(src, dst, dim, s, t, m)
    return out


def apply_single(state, int s, matrix):
    cdef const double complex[::1] src = np.ascontiguousarray(state, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(matrix, dtype=np.complex128)
    cdef Py_ssize_t dim = src.shape[0]
    cdef int nbits = _nbits(dim)
    if s < 0 or s >= nbits:
        raise ValueError(f"qubit {s} out of range for {nbits} qubits")
    out = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] dst = out
    cdef Py_ssize_t ms = (<Py_ssize_t>1) << s
    cdef Py_ssize_t i
    cdef double complex a0, a1
    with nogil:
        for i in range(dim):
            if i & ms:
                continue
            a0 = src[i]
            a1 = src[i | ms]
            dst[i] = m[0, 0] * a0 + m[0, 1] * a1
            dst[i | ms] = m[1, 0] * a0 + m[1, 1] * a1
    return out


def apply_diag(state, int s, double complex d0, double complex d1):
    cdef const double complex[::1] src = np.ascontiguousarray(state, dtype=np.complex128)
    cdef Py_ssize_t dim = src.shape[0]
    cdef int nbits = _nbits(dim)
    if s < 0 or s >= nbits:
        raise ValueError(f"qubit {s} out of range for {nbits} qubits")
    out = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] dst = out
    cdef Py_ssize_t ms = (<Py_ssize_t>1) << s
    cdef Py_ssize_t i
    with nogil:
        for i in range(dim):
            dst[i] = src[i] * (d1 if i & ms else d0)
    return out


def expand_branches(states, int s, int t, matrix, diag):
    cdef const double complex[:, ::1] src = np.ascontiguousarray(states, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(matrix, dtype=np.complex128)
    cdef const double complex[:, ::1] d = np.ascontiguousarray(diag, dtype=np.complex128)
    cdef Py_ssize_t k = src.shape[0]
    cdef Py_ssize_t dim = src.shape[1]
    _check_pair(s, t, _nbits(dim))
    out = np.empty((4 * k, dim), dtype=np.complex128)
    cdef double complex[:, ::1] dst = out
    cdef double complex[::1] evolved = np.empty(dim, dtype=np.complex128)
    cdef Py_ssize_t ms = (<Py_ssize_t>1) << s
    cdef Py_ssize_t mt = (<Py_ssize_t>1) << t
    cdef Py_ssize_t j, i
    cdef int o, bs, bt
    cdef double complex f[4][4]
    for o in range(4):
        for bs in range(2):
            for bt in range(2):
                f[o][bs + 2 * bt] = d[o % 2, bs] * d[o // 2, bt]
    with nogil:
        for j in range(k):
            _pair_kernel(src[j], evolved, dim, s, t, m)
            for i in range(dim):
                bs = 1 if i & ms else 0
                bt = 1 if i & mt else 0
                for o in range(4):
                    dst[o * k + j, i] = f[o][bs + 2 * bt] * evolved[i]
    return out
