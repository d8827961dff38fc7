"""Dense kernels behind the dual ridge computation.

Matrices are plain float64 numpy arrays in Fortran (column-major) order, so a
predictor column is a contiguous slice. Cholesky factors follow the upper
form ``W = S.T @ S``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import _backend
from .errors import FactorizationError, InvalidArgumentError

# a pivot must exceed this fraction of the largest diagonal entry
PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10


def as_dense(a, name: str = "matrix") -> np.ndarray:
    """Validate a 2-D finite array and return it as Fortran-ordered float64."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidArgumentError(f"{name} contains NaN or infinite entries")
    return np.asfortranarray(arr)


@dataclass(frozen=True)
class CholeskyFactor:
    """Upper-triangular ``s`` with ``s.T @ s`` equal to the factored matrix."""

    s: np.ndarray

    @property
    def dim(self) -> int:
        return self.s.shape[0]


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (lam > 0 and np.isfinite(lam)):
        raise InvalidArgumentError(f"lambda must be a positive finite number, got {lam}")
    return lam


def gram_ridge(x, lam: float) -> np.ndarray:
    """Return ``W = x @ x.T + lam * I`` (n x n, exactly symmetric)."""
    lam = _check_lambda(lam)
    x = as_dense(x, "x")
    return _backend.kernels.gram_upper(x, lam)


def cholesky(w) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix as ``S.T @ S``.

    Raises FactorizationError with the 0-based index of the first pivot that
    is not above ``PIVOT_RTOL`` times the largest diagonal entry.
    """
    w = as_dense(w, "w")
    n, m = w.shape
    if n != m or n < 1:
        raise InvalidArgumentError(f"cholesky needs a non-empty square matrix, got {w.shape}")
    scale = np.abs(w).max()
    if np.abs(w - w.T).max() > SYMMETRY_RTOL * max(scale, 1.0):
        raise InvalidArgumentError("matrix is not symmetric")
    tol = PIVOT_RTOL * max(float(np.diag(w).max()), 0.0)
    s, failed = _backend.kernels.cholesky_upper(w, tol)
    if failed >= 0:
        raise FactorizationError(
            f"matrix is not positive definite: pivot {failed} is not positive", index=failed
        )
    return CholeskyFactor(s)


def solve_transposed_triangular(factor: CholeskyFactor, b) -> np.ndarray:
    """Solve ``S.T @ v = b`` by forward substitution."""
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.ndim != 1 or b.shape[0] != factor.dim:
        raise InvalidArgumentError(
            f"right-hand side has shape {b.shape}, expected ({factor.dim},)"
        )
    return _backend.kernels.solve_upper_t(factor.s, b)


def invert_spd(w) -> np.ndarray:
    """Inverse of an SPD matrix via Cholesky and two triangular solves per column.

    Intended for oracle-sized problems only (O(m^3), m up to a few thousand).
    """
    factor = cholesky(w)
    eye = np.eye(factor.dim)
    half = solve_triangular(factor.s, eye, trans="T", check_finite=False)
    inv = solve_triangular(factor.s, half, check_finite=False)
    # average out the roundoff asymmetry
    return np.asfortranarray(0.5 * (inv + inv.T))
