"""Pure-Python (numpy/scipy) implementations of the compiled kernels.

Same signatures and return conventions as ``_kernels``. Used when the
extension is not built, or when ``RPC_BACKEND=python`` is set.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

BACKEND_NAME = "python"


def gram_upper(x: np.ndarray, lam: float) -> np.ndarray:
    n = x.shape[0]
    w = np.asfortranarray(x @ x.T)
    upper = np.triu(w)
    w = upper + np.triu(upper, 1).T
    w[np.diag_indices(n)] += lam
    return np.asfortranarray(w)


def cholesky_upper(w: np.ndarray, tol: float):
    n = w.shape[0]
    s = np.zeros((n, n), order="F")
    for j in range(n):
        col = s[:j, j]
        if j:
            # s[:j, j] solves s[:j, :j].T @ col = w[:j, j]
            col[:] = solve_triangular(s[:j, :j], w[:j, j], trans="T", check_finite=False)
        d = w[j, j] - col @ col
        if not d > tol:
            return None, j
        s[j, j] = np.sqrt(d)
    return s, -1


def solve_upper_t(s: np.ndarray, b: np.ndarray) -> np.ndarray:
    return solve_triangular(s, b, trans="T", check_finite=False)


def column_quadratics(s, x, theta, num_threads=1):
    # num_threads is accepted for signature parity; one dtrsm call covers all columns
    u = solve_triangular(s, x, trans="T", check_finite=False)
    return u.T @ theta, np.einsum("ij,ij->j", u, u)
