# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the dual ridge computations.

All matrices are Fortran-ordered float64. Upper-triangular factors are stored
column-major so that column j holds S[0..j, j] contiguously, which turns every
inner product in the factorization and the transposed solve into a unit-stride
dot product.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport parallel, prange
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dsyrk, dtrsm

cnp.import_array()

# Columns per transposed-solve block. Fixed so the work split, and therefore
# every floating point result, never depends on the thread count.
cdef enum:
    BLOCK = 64

BACKEND_NAME = "compiled"


cdef inline double _dot(const double* a, const double* b, Py_ssize_t m) noexcept nogil:
    # four accumulators in a fixed order: deterministic and pipelines well
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t k = 0
    cdef Py_ssize_t m4 = m - (m % 4)
    while k < m4:
        s0 += a[k] * b[k]
        s1 += a[k + 1] * b[k + 1]
        s2 += a[k + 2] * b[k + 2]
        s3 += a[k + 3] * b[k + 3]
        k += 4
    while k < m:
        s0 += a[k] * b[k]
        k += 1
    return (s0 + s1) + (s2 + s3)


def gram_upper(double[::1, :] x, double lam):
    """Return ``x @ x.T + lam * I`` as a symmetric Fortran array."""
    cdef int n = <int>x.shape[0]
    cdef int p = <int>x.shape[1]
    cdef double alpha = 1.0, beta = 0.0
    cdef char uplo = b'U', trans = b'N'
    out = np.zeros((n, n), dtype=np.float64, order="F")
    cdef double[::1, :] w = out
    cdef Py_ssize_t i, j
    if n == 0:
        return out
    if p > 0:
        dsyrk(&uplo, &trans, &n, &p, &alpha, &x[0, 0], &n, &beta, &w[0, 0], &n)
    for j in range(n):
        w[j, j] += lam
        for i in range(j):
            w[j, i] = w[i, j]
    return out


def cholesky_upper(double[::1, :] w, double tol):
    """Upper factor S with S.T @ S = w.

    Returns ``(S, -1)`` on success and ``(None, j)`` when pivot ``j`` is not
    above ``tol``.
    """
    cdef Py_ssize_t n = w.shape[0]
    out = np.zeros((n, n), dtype=np.float64, order="F")
    cdef double[::1, :] s = out
    cdef Py_ssize_t i, j
    cdef double acc
    cdef Py_ssize_t failed = -1
    with nogil:
        for j in range(n):
            for i in range(j):
                acc = w[i, j] - _dot(&s[0, i], &s[0, j], i)
                s[i, j] = acc / s[i, i]
            acc = w[j, j] - _dot(&s[0, j], &s[0, j], j)
            if not (acc > tol):
                failed = j
                break
            s[j, j] = sqrt(acc)
    if failed >= 0:
        return None, failed
    return out, -1


def solve_upper_t(double[::1, :] s, double[::1] b):
    """Forward substitution for ``s.T @ v = b``."""
    cdef Py_ssize_t n = s.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] v = out
    cdef Py_ssize_t j
    with nogil:
        for j in range(n):
            v[j] = (b[j] - _dot(&s[0, j], &v[0], j)) / s[j, j]
    return out


cdef void _solve_block(const double* low, double* u, Py_ssize_t n, Py_ssize_t m) noexcept nogil:
    # In-place forward substitution low @ u = b for m columns of u (leading
    # dimension n), low = s.T stored column-major. Column-oriented (axpy)
    # form: the inner loop has no reduction, so it vectorizes, and four
    # right-hand sides share each pass over a column of low.
    cdef Py_ssize_t c, j, k
    cdef double a0, a1, a2, a3, lk, d
    cdef const double* lj
    cdef double* u0
    cdef double* u1
    cdef double* u2
    cdef double* u3
    c = 0
    while c + 4 <= m:
        u0 = u + c * n
        u1 = u0 + n
        u2 = u1 + n
        u3 = u2 + n
        for j in range(n):
            lj = low + j * n
            d = lj[j]
            a0 = u0[j] / d
            a1 = u1[j] / d
            a2 = u2[j] / d
            a3 = u3[j] / d
            u0[j] = a0
            u1[j] = a1
            u2[j] = a2
            u3[j] = a3
            for k in range(j + 1, n):
                lk = lj[k]
                u0[k] -= a0 * lk
                u1[k] -= a1 * lk
                u2[k] -= a2 * lk
                u3[k] -= a3 * lk
        c += 4
    while c < m:
        u0 = u + c * n
        for j in range(n):
            lj = low + j * n
            a0 = u0[j] / lj[j]
            u0[j] = a0
            for k in range(j + 1, n):
                u0[k] -= a0 * lj[k]
        c += 1


def column_quadratics(double[::1, :] s, double[::1, :] x, double[::1] theta,
                      int num_threads=1, bint use_blas=False):
    """For every column x_i: u_i = s^{-T} x_i, return (u_i . theta, u_i . u_i).

    Columns are solved in fixed blocks on a per-thread copy, so x is never
    modified and u is never materialized in full. ``use_blas`` swaps the
    built-in block solve for BLAS dtrsm (kept for benchmarking).
    """
    cdef int n = <int>x.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    ut_arr = np.zeros(p, dtype=np.float64)
    uu_arr = np.zeros(p, dtype=np.float64)
    cdef double[::1] ut = ut_arr
    cdef double[::1] uu = uu_arr
    if n == 0 or p == 0:
        return ut_arr, uu_arr
    cdef Py_ssize_t nblocks = (p + BLOCK - 1) // BLOCK
    cdef Py_ssize_t blk, j, start, m
    cdef double* buf
    cdef double* col
    cdef int mi
    cdef double one = 1.0
    cdef char side = b'L', uplo = b'U', transa = b'T', diag = b'N'
    if num_threads < 1:
        num_threads = 1
    cdef double[::1, :] low = np.asfortranarray(np.asarray(s).T)
    with nogil, parallel(num_threads=num_threads):
        buf = <double*>malloc(n * BLOCK * sizeof(double))
        for blk in prange(nblocks, schedule="static"):
            start = blk * BLOCK
            m = p - start
            if m > BLOCK:
                m = BLOCK
            mi = <int>m
            memcpy(buf, &x[0, start], n * m * sizeof(double))
            if use_blas:
                dtrsm(&side, &uplo, &transa, &diag, &n, &mi, &one,
                      &s[0, 0], &n, buf, &n)
            else:
                _solve_block(&low[0, 0], buf, n, m)
            for j in range(m):
                col = buf + j * n
                ut[start + j] = _dot(col, &theta[0], n)
                uu[start + j] = _dot(col, col, n)
        free(buf)
    return ut_arr, uu_arr
