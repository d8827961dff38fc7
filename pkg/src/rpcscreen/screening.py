"""Screening scores and submodel selection.

Ridge partial correlation (RPC) is computed two ways: ``rpc_fast`` works in
the n x n dual through a Cholesky factor of ``X X^T + lam I`` and costs
O(n^3 + n^2 p); ``rpc_oracle`` inverts the (p+1) x (p+1) bordered matrix
directly and exists to check the fast path. HOLP, SIS and forward regression
are the baselines.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _backend
from .errors import (
    DataValidationError,
    DegenerateInputError,
    InvalidArgumentError,
    NumericalError,
)
from .linalg import CholeskyFactor, as_dense, cholesky, invert_spd, solve_transposed_triangular

# v_i within this of zero (from below) is roundoff and gets clamped
VI_NEG_TOL = 1e-10
VI_FLOOR = 1e-15


class Method(str, enum.Enum):
    RPC = "RPC"
    HOLP = "HOLP"
    SIS = "SIS"
    FR = "FR"
    UNION = "UNION"


@dataclass(frozen=True)
class StandardizedData:
    """Centered, unit-sample-SD predictors and the centered response."""

    x: np.ndarray
    y_tilde: np.ndarray
    column_means: np.ndarray
    column_scales: np.ndarray
    y_bar: float

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        """``x @ x.T``, shared by every ridge penalty on this data."""
        return _backend.kernels.gram_upper(self.x, 0.0)

    def transform(self, x_raw) -> np.ndarray:
        """Apply the stored centering and scaling to new rows."""
        return (np.asarray(x_raw, dtype=np.float64) - self.column_means) / self.column_scales


def standardize(x_raw, y_raw) -> StandardizedData:
    """Center and scale each column to unit sample SD; center the response."""
    x = as_dense(x_raw, "x")
    y = np.asarray(y_raw, dtype=np.float64).ravel()
    n, p = x.shape
    if n < 3:
        raise InvalidArgumentError(f"need at least 3 observations, got {n}")
    if y.shape[0] != n:
        raise InvalidArgumentError(f"response has {y.shape[0]} entries but x has {n} rows")
    if not np.isfinite(y).all():
        raise InvalidArgumentError("response contains NaN or infinite entries")
    means = x.mean(axis=0)
    centered = x - means
    scales = np.sqrt(np.einsum("ij,ij->j", centered, centered) / (n - 1))
    tiny = scales <= 1e-12 * np.maximum(1.0, np.abs(means))
    if tiny.any():
        j = int(np.flatnonzero(tiny)[0])
        raise DataValidationError(f"column {j} is constant", col=j)
    xs = np.asfortranarray(centered / scales)
    y_bar = float(y.mean())
    return StandardizedData(xs, y - y_bar, means, scales, y_bar)


def _require_response(data: StandardizedData) -> None:
    if np.abs(data.y_tilde).max() <= 1e-13 * max(1.0, abs(data.y_bar)):
        raise DegenerateInputError("response is constant after centering; nothing to screen")


def _check_lambda(lam) -> float:
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidArgumentError(f"lambda must be a positive finite number, got {lam}")
    return lam


@dataclass(frozen=True)
class RpcComponents:
    """v-quantities and scores for one ridge penalty.

    ``xi`` is the diagonal of ``(X^T X + lam I)^{-1}`` and ``s_lambda`` the
    ridge residual sum of squares; ``v_y * s_lambda == 1``.
    """

    lam: float
    v_y: float
    v_iy: np.ndarray
    v_i: np.ndarray
    scores: np.ndarray
    xi: np.ndarray
    s_lambda: float

    @property
    def beta_hat(self) -> np.ndarray:
        """Ridge coefficients ``X^T W^{-1} y``, i.e. the HOLP criterion."""
        return -self.v_iy / self.v_y


@dataclass(frozen=True)
class _DualSolve:
    factor: CholeskyFactor
    theta: np.ndarray
    u_theta: np.ndarray
    u_u: np.ndarray


def _dual_solve(data: StandardizedData, lam: float, threads: int | None,
                kernels=None) -> _DualSolve:
    kernels = kernels or _backend.kernels
    threads = threads or _backend.get_num_threads()
    w = np.array(data.gram, order="F")
    w[np.diag_indices_from(w)] += lam
    factor = cholesky(w)
    theta = solve_transposed_triangular(factor, data.y_tilde)
    u_theta, u_u = kernels.column_quadratics(factor.s, data.x, theta, threads)
    return _DualSolve(factor, theta, u_theta, u_u)


def rpc_fast(data: StandardizedData, lam: float, threads: int | None = None,
             kernels=None) -> RpcComponents:
    """Ridge partial correlations through the n x n dual.

    With ``S.T S = X X^T + lam I``, ``theta = S^{-T} y`` and
    ``u_i = S^{-T} x_i``::

        v_y  = 1 / (lam theta.theta)
        v_iy = -v_y u_i.theta
        v_i  = (1 - u_i.u_i) / lam + v_y (u_i.theta)^2
        R_i  = -v_iy / sqrt(v_i v_y)

    The per-column loop is split over ``threads`` workers; results do not
    depend on the worker count.
    """
    lam = _check_lambda(lam)
    _require_response(data)
    dual = _dual_solve(data, lam, threads, kernels)
    tt = float(dual.theta @ dual.theta)
    if not tt > 0:
        raise DegenerateInputError("theta'theta is zero; response is degenerate")
    s_lambda = lam * tt
    v_y = 1.0 / s_lambda
    xi = (1.0 - dual.u_u) / lam
    v_iy = -v_y * dual.u_theta
    v_i = xi + v_y * dual.u_theta**2
    bad = v_i <= 0
    if bad.any():
        worst = int(np.argmin(v_i))
        if v_i[worst] < -VI_NEG_TOL:
            raise NumericalError(
                f"partial variance for column {worst} is {v_i[worst]:.3e} (< 0)", index=worst
            )
        v_i = np.where(bad, VI_FLOOR, v_i)
    scores = np.clip(-v_iy / np.sqrt(v_i * v_y), -1.0, 1.0)
    return RpcComponents(lam, v_y, v_iy, v_i, scores, xi, s_lambda)


def rpc_oracle(data: StandardizedData, lam: float) -> RpcComponents:
    """Ridge partial correlations read off the inverted bordered matrix.

    Builds ``[[y'y, y'X], [X'y, X'X + lam I]]``, inverts it in full and takes
    v_y, v_iy, v_i from its first row and diagonal. O((p+1)^3); for checking.
    """
    lam = _check_lambda(lam)
    _require_response(data)
    x, y = data.x, data.y_tilde
    p = data.p
    if p + 1 > 2000:
        raise InvalidArgumentError(f"oracle limited to p + 1 <= 2000, got p = {p}")
    bordered = np.empty((p + 1, p + 1))
    xty = x.T @ y
    bordered[0, 0] = y @ y
    bordered[0, 1:] = xty
    bordered[1:, 0] = xty
    bordered[1:, 1:] = x.T @ x
    bordered[1:, 1:][np.diag_indices(p)] += lam
    inv = invert_spd(bordered)
    v_y = float(inv[0, 0])
    v_iy = inv[0, 1:].copy()
    v_i = np.diag(inv)[1:].copy()
    scores = -v_iy / np.sqrt(v_i * v_y)
    # block inverse: lower-right block is A^{-1} + A^{-1} b b' A^{-1} / S
    xi = v_i - v_iy**2 / v_y
    return RpcComponents(lam, v_y, v_iy, v_i, scores, xi, 1.0 / v_y)


def holp_scores(data: StandardizedData, lam: float, threads: int | None = None,
                kernels=None) -> np.ndarray:
    """Ridge coefficients ``X^T (X X^T + lam I)^{-1} y``; rank by absolute value."""
    lam = _check_lambda(lam)
    _require_response(data)
    return _dual_solve(data, lam, threads, kernels).u_theta


def sis_scores(data: StandardizedData) -> np.ndarray:
    """Marginal Pearson correlation of each column with the response."""
    _require_response(data)
    x, y = data.x, data.y_tilde
    norms = np.sqrt(np.einsum("ij,ij->j", x, x))
    corr = (x.T @ y) / (norms * np.sqrt(y @ y))
    return np.clip(corr, -1.0, 1.0)


@dataclass(frozen=True)
class ScreenResult:
    method: Method
    selected: np.ndarray
    scores: np.ndarray = field(default_factory=lambda: np.empty(0))
    lambda_used: float | tuple[float, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.selected)


def select_top_k(scores, k: int, method: Method = Method.RPC,
                 lambda_used=None) -> ScreenResult:
    """Indices of the k largest |scores|, ties broken by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    p = scores.shape[0]
    if not 1 <= k <= p:
        raise InvalidArgumentError(f"k must be in [1, {p}], got {k}")
    order = np.argsort(-np.abs(scores), kind="stable")[:k]
    return ScreenResult(Method(method), order.astype(np.intp), scores, lambda_used)


def union_submodels(results: Sequence[ScreenResult]) -> ScreenResult:
    """Set union of several submodels, kept in order of first appearance."""
    if not results:
        raise InvalidArgumentError("union of an empty list of submodels")
    p_values = {r.scores.shape[0] for r in results if r.scores.size}
    if len(p_values) > 1:
        raise InvalidArgumentError(f"submodels come from different p: {sorted(p_values)}")
    seen: dict[int, None] = {}
    for r in results:
        for i in r.selected:
            seen.setdefault(int(i), None)
    lambdas = []
    for r in results:
        if isinstance(r.lambda_used, tuple):
            lambdas.extend(r.lambda_used)
        elif r.lambda_used is not None:
            lambdas.append(r.lambda_used)
    return ScreenResult(
        Method.UNION,
        np.fromiter(seen, dtype=np.intp, count=len(seen)),
        lambda_used=tuple(lambdas) or None,
    )


def fr_screen(data: StandardizedData, k: int) -> ScreenResult:
    """Greedy forward regression for exactly k steps.

    Each step adds the column with the largest drop in residual sum of
    squares given the active set. The residual stays orthogonal to the
    active span, so a candidate's drop is ``(x_j.r)^2 / |z_j|^2`` where
    ``z_j`` is x_j with the active span projected out; ``|z_j|^2`` is
    downdated by one inner product per step. O(n p) per step.
    """
    _require_response(data)
    n, p = data.n, data.p
    if not 1 <= k <= min(n - 2, p):
        raise InvalidArgumentError(f"k must be in [1, {min(n - 2, p)}], got {k}")
    x = data.x
    r = data.y_tilde.copy()
    base = np.einsum("ij,ij->j", x, x)
    znorm2 = base.copy()
    q_basis = np.empty((n, k))
    active = np.zeros(p, dtype=bool)
    gain = np.zeros(p)
    order = np.empty(k, dtype=np.intp)
    for step in range(k):
        g = x.T @ r
        eligible = (~active) & (znorm2 > 1e-8 * base)
        if not eligible.any():
            raise NumericalError(f"forward regression ran out of independent columns at step {step}")
        crit = np.where(eligible, g * g / np.where(eligible, znorm2, 1.0), -np.inf)
        j = int(np.argmax(crit))
        q = x[:, j].copy()
        basis = q_basis[:, :step]
        for _ in range(2):  # re-orthogonalize once
            q -= basis @ (basis.T @ q)
        q /= np.linalg.norm(q)
        q_basis[:, step] = q
        coef = q @ r
        gain[j] = coef * coef
        r -= coef * q
        znorm2 -= (x.T @ q) ** 2
        active[j] = True
        order[step] = j
    return ScreenResult(Method.FR, order, gain)


def lambda_presets(n: int, p: int) -> tuple[float, float, float]:
    """(p/n, n ln(n)/p, n/p): the RPC1, RPC2 and RPC3 penalties."""
    if n < 2 or p < 1:
        raise InvalidArgumentError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    return p / n, n * math.log(n) / p, n / p


PRESET_NAMES = ("rpc1", "rpc2", "rpc3")


def resolve_lambda(value, n: int, p: int) -> float:
    """Turn a float or preset name (rpc1/rpc2/rpc3) into a penalty."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in PRESET_NAMES:
            return lambda_presets(n, p)[PRESET_NAMES.index(key)]
        try:
            value = float(key)
        except ValueError:
            raise InvalidArgumentError(
                f"lambda must be a positive number or one of {PRESET_NAMES}, got {value!r}"
            ) from None
    return _check_lambda(value)


def screen(data: StandardizedData, method: str | Method, k: int, lam=None,
           threads: int | None = None) -> ScreenResult:
    """Run one screening method and keep the top k."""
    method = Method(str(method).upper()) if not isinstance(method, Method) else method
    if method is Method.RPC:
        lam = resolve_lambda("rpc1" if lam is None else lam, data.n, data.p)
        return select_top_k(rpc_fast(data, lam, threads).scores, k, method, lam)
    if method is Method.HOLP:
        lam = resolve_lambda("rpc1" if lam is None else lam, data.n, data.p)
        return select_top_k(holp_scores(data, lam, threads), k, method, lam)
    if method is Method.SIS:
        return select_top_k(sis_scores(data), k, method)
    if method is Method.FR:
        if not 1 <= k <= data.p:
            raise InvalidArgumentError(f"k must be in [1, {data.p}], got {k}")
        return fr_screen(data, k)
    raise InvalidArgumentError(f"method {method.value} is not a single screener")
