import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpcscreen.errors import FactorizationError, InvalidArgumentError
from rpcscreen.linalg import (
    CholeskyFactor,
    cholesky,
    gram_ridge,
    invert_spd,
    solve_transposed_triangular,
)


def naive_gram(x, lam):
    n, p = x.shape
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(p):
                acc += x[i, k] * x[j, k]
            w[i, j] = acc + (lam if i == j else 0.0)
    return w


class TestGramRidge:
    def test_identity(self, backend):
        np.testing.assert_array_equal(gram_ridge(np.eye(2), 1.0), np.diag([2.0, 2.0]))

    def test_zero_matrix(self, backend):
        np.testing.assert_array_equal(gram_ridge(np.zeros((3, 5)), 0.5), 0.5 * np.eye(3))

    def test_matches_triple_loop(self, backend):
        x = np.random.default_rng(4).standard_normal((4, 10))
        w = gram_ridge(x, 2.0)
        np.testing.assert_allclose(w, naive_gram(x, 2.0), rtol=0, atol=1e-12)
        assert np.array_equal(w, w.T)
        assert w.flags.f_contiguous

    @pytest.mark.parametrize("lam", [0.0, -1.0, np.inf, np.nan])
    def test_rejects_bad_lambda(self, lam):
        with pytest.raises(InvalidArgumentError):
            gram_ridge(np.ones((2, 2)), lam)

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidArgumentError):
            gram_ridge(np.array([[1.0, np.nan]]), 1.0)

    def test_linear_in_lambda(self, backend, rng):
        x = rng.standard_normal((7, 13))
        lam0, lam = 1e-9, 3.25
        diff = gram_ridge(x, lam) - gram_ridge(x, lam0)
        np.testing.assert_allclose(diff, (lam - lam0) * np.eye(7), rtol=0, atol=1e-12)


class TestCholesky:
    def test_diagonal(self, backend):
        f = cholesky(4 * np.eye(3))
        np.testing.assert_array_equal(f.s, 2 * np.eye(3))
        assert f.dim == 3

    def test_two_by_two(self, backend):
        # hand solve: s11 = 2, s12 = 2/2 = 1, s22 = sqrt(5 - 1) = 2
        f = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
        np.testing.assert_allclose(f.s, [[2.0, 1.0], [0.0, 2.0]], atol=1e-15)
        np.testing.assert_allclose(f.s.T @ f.s, [[4.0, 2.0], [2.0, 5.0]], atol=1e-15)

    def test_indefinite_reports_pivot(self, backend):
        with pytest.raises(FactorizationError) as exc:
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert exc.value.index == 1

    def test_tiny_pivot_is_an_error(self, backend):
        w = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        with pytest.raises(FactorizationError) as exc:
            cholesky(w)
        assert exc.value.index == 1

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidArgumentError):
            cholesky(np.array([[2.0, 1.0], [0.0, 2.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(InvalidArgumentError):
            cholesky(np.ones((2, 3)))

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 50), seed=st.integers(0, 2**32 - 1))
    def test_reconstruction_property(self, n, seed):
        a = np.random.default_rng(seed).standard_normal((n, n + 3))
        w = a @ a.T + 0.1 * np.eye(n)
        w = (w + w.T) / 2
        s = cholesky(w).s
        assert np.all(np.tril(s, -1) == 0)
        assert np.all(np.diag(s) > 0)
        assert np.abs(s.T @ s - w).max() <= 1e-8 * np.abs(w).max()


class TestTriangularSolve:
    def test_identity(self, backend):
        f = CholeskyFactor(np.asfortranarray(np.eye(3)))
        np.testing.assert_array_equal(solve_transposed_triangular(f, [1, 2, 3]), [1, 2, 3])

    def test_diagonal(self, backend):
        f = CholeskyFactor(np.asfortranarray(2 * np.eye(2)))
        np.testing.assert_array_equal(solve_transposed_triangular(f, [4, 6]), [2, 3])

    def test_hand_solved(self, backend):
        # 2 v1 = 2; v1 + 2 v2 = 5
        f = CholeskyFactor(np.asfortranarray([[2.0, 1.0], [0.0, 2.0]]))
        np.testing.assert_allclose(solve_transposed_triangular(f, [2, 5]), [1, 2], atol=1e-15)

    def test_dimension_mismatch(self):
        f = CholeskyFactor(np.asfortranarray(np.eye(3)))
        with pytest.raises(InvalidArgumentError):
            solve_transposed_triangular(f, [1.0, 2.0])

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 50), seed=st.integers(0, 2**32 - 1))
    def test_inverts_transpose_product(self, n, seed):
        r = np.random.default_rng(seed)
        a = r.standard_normal((n, n + 2))
        f = cholesky(a @ a.T + np.eye(n))
        b = r.standard_normal(n)
        v = solve_transposed_triangular(f, b)
        assert np.abs(f.s.T @ v - b).max() <= 1e-8 * np.abs(b).max()
        b2 = f.s.T @ b
        assert np.abs(solve_transposed_triangular(f, b2) - b).max() <= 1e-8 * max(np.abs(b).max(), 1)


class TestInvertSpd:
    def test_identity(self, backend):
        np.testing.assert_allclose(invert_spd(np.eye(4)), np.eye(4), atol=1e-15)

    def test_diagonal(self, backend):
        np.testing.assert_allclose(invert_spd(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-15)

    def test_seeded_product(self, backend):
        a = np.random.default_rng(6).standard_normal((6, 6))
        w = a.T @ a + np.eye(6)
        inv = invert_spd(w)
        assert np.abs(w @ inv - np.eye(6)).max() <= 1e-9

    def test_singular(self):
        with pytest.raises(FactorizationError):
            invert_spd(np.ones((3, 3)))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 10), p=st.integers(1, 20), lam=st.sampled_from([0.1, 1.0, 10.0]),
       seed=st.integers(0, 2**32 - 1))
def test_woodbury_identity(n, p, lam, seed):
    x = np.random.default_rng(seed).standard_normal((n, p))
    direct = np.linalg.inv(x.T @ x + lam * np.eye(p))
    w_inv = invert_spd(gram_ridge(x, lam))
    dual = (np.eye(p) - x.T @ w_inv @ x) / lam
    assert np.abs(direct - dual).max() <= 1e-8
