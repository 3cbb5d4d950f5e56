import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dfngan.exceptions import NonFinite, NonSquare, TooSmall, ZeroMatrix
from dfngan.linalg import downsample2, hessenberg_reduce, real_schur, top_singular_triplet
from oracles import jacobi_singular_values, lapack_eigenvalues, lu_determinant


def _match_eigs(ours, ref):
    """Greedy nearest matching of two eigenvalue lists; max distance."""
    ref = list(ref)
    worst = 0.0
    for lam in ours:
        j = int(np.argmin([abs(lam - r) for r in ref]))
        worst = max(worst, abs(lam - ref.pop(j)))
    return worst


class TestHessenberg:
    def test_two_by_two_untouched(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        q, h = hessenberg_reduce(x)
        np.testing.assert_array_equal(q, np.eye(2))
        np.testing.assert_array_equal(h, x)

    def test_symmetric_gives_tridiagonal(self, rng):
        a = rng.standard_normal((4, 4))
        _, h = hessenberg_reduce(a + a.T)
        assert np.max(np.abs(np.triu(h, 2))) < 1e-12
        assert np.max(np.abs(np.tril(h, -2))) < 1e-12

    def test_reconstruction(self, rng):
        x = rng.standard_normal((8, 8))
        q, h = hessenberg_reduce(x)
        assert np.linalg.norm(q.T @ x @ q - h) < 1e-10 * np.linalg.norm(x)
        assert np.all(np.tril(h, -2) == 0.0)
        assert np.linalg.norm(q.T @ q - np.eye(8)) < 1e-12

    def test_rejects_rectangular(self):
        with pytest.raises(NonSquare):
            hessenberg_reduce(np.ones((2, 3)))


class TestRealSchur:
    def test_upper_triangular_identity_q(self):
        x = np.triu(np.arange(1.0, 17.0).reshape(4, 4))
        form = real_schur(x)
        np.testing.assert_array_equal(form.q, np.eye(4))
        np.testing.assert_allclose(np.sort(form.eigenvalues.real), [1, 6, 11, 16])

    def test_symmetric_two_by_two(self):
        form = real_schur(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(np.sort(form.eigenvalues.real), [1.0, 3.0], atol=1e-14)
        assert np.all(form.eigenvalues.imag == 0.0)

    def test_rotation_keeps_complex_block(self):
        form = real_schur(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert form.blocks() == [(0, 2)]
        np.testing.assert_allclose(sorted(form.eigenvalues.imag), [-1.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(form.eigenvalues.real, 0.0, atol=1e-14)

    @pytest.mark.parametrize("n", [1, 3, 4, 8, 16, 33])
    def test_invariants_and_lapack_agreement(self, rng, n):
        x = rng.standard_normal((n, n))
        form = real_schur(x)
        q, t = form.q, form.t
        assert np.linalg.norm(q @ t @ q.T - x) <= 1e-8 * np.linalg.norm(x)
        assert np.linalg.norm(q.T @ q - np.eye(n)) <= 1e-10 * n
        assert np.all(np.tril(t, -2) == 0.0)
        assert _match_eigs(form.eigenvalues, lapack_eigenvalues(x)) < 1e-8 * max(1.0, np.linalg.norm(x))

    def test_product_matches_lu_determinant(self, rng):
        x = rng.standard_normal((10, 10))
        prod = np.prod(real_schur(x).eigenvalues)
        det = lu_determinant(x)
        assert abs(prod.imag) < 1e-8 * abs(det)
        assert abs(prod.real - det) < 1e-6 * abs(det)

    def test_refactoring_t_keeps_orthogonality(self, rng):
        x = rng.standard_normal((12, 12))
        first = real_schur(x)
        second = real_schur(first.t)
        assert np.linalg.norm(second.q.T @ second.q - np.eye(12)) < 1e-10 * 12
        assert _match_eigs(second.eigenvalues, first.eigenvalues) < 1e-8

    def test_blocks_have_complex_eigs_only(self, rng):
        form = real_schur(rng.standard_normal((20, 20)))
        for start, size in form.blocks():
            if size == 2:
                assert form.eigenvalues[start].imag != 0.0
                assert form.eigenvalues[start] == np.conj(form.eigenvalues[start + 1])

    def test_zero_and_repeated(self):
        assert np.all(real_schur(np.zeros((5, 5))).eigenvalues == 0)
        jordan = np.eye(4) * 2 + np.diag(np.ones(3), 1)
        np.testing.assert_allclose(real_schur(jordan).eigenvalues, 2.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFinite):
            real_schur(np.array([[1.0, np.nan], [0.0, 1.0]]))

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10, allow_subnormal=False)))
    def test_trace_equals_eigensum(self, x):
        form = real_schur(x)
        scale = max(np.linalg.norm(x), 1.0)
        assert abs(np.sum(form.eigenvalues).real - np.trace(x)) <= 1e-8 * scale
        assert np.linalg.norm(form.q @ form.t @ form.q.T - x) <= 1e-8 * scale


class TestTopSingular:
    def test_diagonal(self):
        s, u, v = top_singular_triplet(np.diag([3.0, 1.0]))
        assert s == pytest.approx(3.0, rel=1e-12)
        assert abs(abs(u[0]) - 1) < 1e-12 and abs(abs(v[0]) - 1) < 1e-12

    def test_rank_one(self, rng):
        a, b = rng.standard_normal(5), rng.standard_normal(4)
        s, _, _ = top_singular_triplet(np.outer(a, b))
        assert s == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b), rel=1e-12)

    def test_matches_jacobi_oracle(self, rng):
        hits = 0
        for _ in range(20):
            x = rng.standard_normal((16, 16))
            ref = jacobi_singular_values(x)
            if ref[1] > 0.9 * ref[0]:
                continue
            s, u, v = top_singular_triplet(x)
            assert abs(s - ref[0]) <= 1e-4 * ref[0]
            assert np.linalg.norm(x @ v - s * u) <= 1e-6 * s
            hits += 1
        assert hits >= 5

    def test_zero_raises(self):
        with pytest.raises(ZeroMatrix):
            top_singular_triplet(np.zeros((3, 3)))


class TestDownsample:
    def test_ones(self):
        np.testing.assert_array_equal(downsample2(np.ones((2, 2))), [[1.0]])

    def test_arithmetic_means(self):
        x = np.arange(1.0, 17.0).reshape(4, 4)
        np.testing.assert_array_equal(downsample2(x), [[3.5, 5.5], [11.5, 13.5]])

    @pytest.mark.parametrize("phase", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_odd_size(self, phase):
        assert downsample2(np.ones((5, 5)), *phase).shape == (2, 2)

    def test_too_small(self):
        with pytest.raises(TooSmall):
            downsample2(np.ones((1, 4)))


class TestScaleRobustness:
    @pytest.mark.parametrize("scale", [1e-200, 1e-20, 1e20, 1e200])
    def test_extreme_scales(self, rng, scale):
        x = rng.standard_normal((8, 8)) * scale
        form = real_schur(x)
        assert np.linalg.norm(form.q @ form.t @ form.q.T - x) <= 1e-8 * np.linalg.norm(x)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (5, 5), elements=st.floats(-1e6, 1e6, allow_subnormal=False)))
    def test_mixed_magnitudes_converge(self, x):
        form = real_schur(x)
        scale = max(np.linalg.norm(x), 1e-300)
        assert np.linalg.norm(form.q @ form.t @ form.q.T - x) <= 1e-8 * scale
