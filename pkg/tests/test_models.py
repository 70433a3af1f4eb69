import math

import numpy as np
import pytest

from atlas_sensing import (
    GroundTruthSpec,
    MatrixClass,
    SingularModelError,
    SparseDecomposition,
    assemble_matrix,
    effective_sparsity_ratio,
    gramian_constants,
    sample_effectively_sparse_unit_vector,
    sample_ground_truth,
    sample_sparse_unit_vector,
    schatten_quasi_norm,
)
from atlas_sensing.linalg import jacobi_eigh, jacobi_svd, singular_values

from oracles import assemble_bruteforce


class TestSparseUnitVector:
    def test_dense_case_is_unit(self):
        v = sample_sparse_unit_vector(5, 5, np.random.default_rng(0))
        assert np.count_nonzero(v) == 5
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)

    def test_single_entry_is_signed_basis_vector(self):
        v = sample_sparse_unit_vector(8, 1, np.random.default_rng(1))
        assert np.count_nonzero(v) == 1
        assert abs(v[np.nonzero(v)][0]) == pytest.approx(1.0, abs=1e-14)

    def test_l1_budget_over_many_draws(self):
        rng = np.random.default_rng(2)
        for _ in range(10_000):
            v = sample_sparse_unit_vector(100, 10, rng)
            assert np.count_nonzero(v) <= 10
            assert np.abs(v).sum() <= math.sqrt(10) * np.linalg.norm(v) + 1e-12

    def test_invalid_sparsity(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_sparse_unit_vector(5, 6, rng)
        with pytest.raises(ValueError):
            sample_sparse_unit_vector(5, 0, rng)


class TestEffectivelySparseUnitVector:
    def test_l1_budget_over_many_draws(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(10_000):
            v = sample_effectively_sparse_unit_vector(100, 10, rng)
            worst = max(worst, np.abs(v).sum() / np.linalg.norm(v))
        assert worst <= math.sqrt(10) + 1e-12

    def test_full_dimension_always_qualifies(self):
        rng = np.random.default_rng(4)
        v = sample_effectively_sparse_unit_vector(12, 12, rng)
        assert np.abs(v).sum() <= math.sqrt(12) + 1e-12

    def test_outputs_are_dense(self):
        rng = np.random.default_rng(5)
        v = sample_effectively_sparse_unit_vector(50, 10, rng)
        assert np.count_nonzero(v) == 50


class TestAssembleMatrix:
    def test_rank_one_outer_product(self):
        d = SparseDecomposition([np.eye(3)[0]], [np.eye(4)[0]], [2.0])
        X = assemble_matrix(d)
        assert X[0, 0] == 2.0
        assert np.count_nonzero(X) == 1

    def test_zero_sigma(self):
        d = SparseDecomposition([np.eye(3)[1]], [np.eye(4)[2]], [0.0])
        assert np.all(assemble_matrix(d) == 0.0)

    def test_against_bruteforce_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n1, n2, R = rng.integers(2, 21), rng.integers(2, 21), rng.integers(1, 5)
            us = [sample_sparse_unit_vector(n1, n1, rng) for _ in range(R)]
            vs = [sample_sparse_unit_vector(n2, n2, rng) for _ in range(R)]
            sig = rng.uniform(0.1, 2.0, R)
            d = SparseDecomposition(us, vs, sig)
            X = assemble_matrix(d)
            Y = assemble_bruteforce(sig, us, vs)
            assert np.linalg.norm(X - Y) <= 1e-12 * max(np.linalg.norm(Y), 1.0)


class TestSampleGroundTruth:
    def test_paper_scale_rank_one(self):
        spec = GroundTruthSpec(n1=16, n2=100, R=1, s1=16, s2=10, target_frobenius=10.0)
        gt = sample_ground_truth(spec, np.random.default_rng(7))
        assert np.linalg.norm(gt.matrix) == pytest.approx(10.0, rel=1e-10)
        assert np.count_nonzero(gt.decomposition.v_factors[0]) <= 10
        X = assemble_matrix(gt.decomposition)
        assert np.linalg.norm(X - gt.matrix) <= 1e-12 * np.linalg.norm(gt.matrix)

    def test_unconstrained_rank_one(self):
        spec = GroundTruthSpec(n1=6, n2=8, R=1, s1=6, s2=8, target_frobenius=3.0)
        gt = sample_ground_truth(spec, np.random.default_rng(8))
        assert np.linalg.norm(gt.matrix) == pytest.approx(3.0, rel=1e-10)

    def test_orthonormalized_common_support(self):
        spec = GroundTruthSpec(
            n1=16, n2=100, R=5, s1=16, s2=10, common_support=True,
            orthonormalize=True, target_frobenius=10.0,
        )
        gt = sample_ground_truth(spec, np.random.default_rng(9))
        V = np.stack(gt.decomposition.v_factors, axis=1)
        G = V.T @ V
        assert np.linalg.norm(G - np.eye(5)) <= 1e-10
        for v in gt.decomposition.v_factors:
            assert np.count_nonzero(v) <= 10

    def test_orthonormalize_without_common_support_refused(self):
        with pytest.raises(ValueError):
            GroundTruthSpec(n1=8, n2=10, R=2, s2=4, orthonormalize=True)

    def test_orthonormalize_needs_enough_support(self):
        with pytest.raises(ValueError):
            GroundTruthSpec(n1=8, n2=10, R=5, s2=3, common_support=True,
                            orthonormalize=True)

    def test_gamma_cap_violation_detected(self):
        spec = GroundTruthSpec(n1=4, n2=6, R=1, target_frobenius=10.0, gamma_cap=1.0)
        with pytest.raises(ValueError, match="gamma_cap"):
            sample_ground_truth(spec, np.random.default_rng(10))

    def test_gamma_cap_satisfied_recorded(self):
        spec = GroundTruthSpec(n1=4, n2=6, R=2, target_frobenius=1.0, gamma_cap=2.0)
        gt = sample_ground_truth(spec, np.random.default_rng(11))
        assert np.linalg.norm(gt.decomposition.sigma) <= 2.0 + 1e-12


class TestEffectiveSparsityRatio:
    def test_one_hot(self):
        assert effective_sparsity_ratio(np.eye(5)[2]) == pytest.approx(1.0)

    def test_flat_vector(self):
        v = np.full(9, 0.7)
        assert effective_sparsity_ratio(v) == pytest.approx(3.0, rel=1e-12)

    def test_three_four(self):
        assert effective_sparsity_ratio(np.array([3.0, 4.0])) == pytest.approx(7.0 / 5.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            effective_sparsity_ratio(np.zeros(3))


class TestSchattenQuasiNorm:
    def test_rank_one(self):
        rng = np.random.default_rng(12)
        u, v = rng.standard_normal(5), rng.standard_normal(7)
        X = np.outer(u, v)
        for p in (0.5, 2.0 / 3.0, 1.0, 2.0):
            expect = np.linalg.norm(u) * np.linalg.norm(v)
            assert schatten_quasi_norm(X, p) == pytest.approx(expect, rel=1e-10)

    def test_diag_frobenius(self):
        X = np.diag([3.0, 4.0])
        assert schatten_quasi_norm(X, 2.0) == pytest.approx(5.0, rel=1e-10)

    def test_diag_two_thirds(self):
        X = np.diag([3.0, 4.0])
        p = 2.0 / 3.0
        expect = (3.0**p + 4.0**p) ** (1.0 / p)
        assert schatten_quasi_norm(X, p) == pytest.approx(expect, rel=1e-10)
        # cross-check singular values against an independent eigen-solve
        w = np.linalg.eigvalsh(X.T @ X)
        assert np.allclose(np.sort(singular_values(X)), np.sort(np.sqrt(w)), rtol=1e-10)

    def test_schatten_two_matches_entrywise_frobenius(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            X = rng.standard_normal((8, 11))
            assert schatten_quasi_norm(X, 2.0) == pytest.approx(
                np.linalg.norm(X), rel=1e-10
            )

    def test_orthonormal_decomposition_identity(self):
        # with orthonormal factors and sigma as singular values,
        # sum_r (sigma_r)^p equals the Schatten quasi-norm^p
        spec = GroundTruthSpec(
            n1=16, n2=40, R=4, s1=16, s2=8, common_support=True,
            orthonormalize=True, target_frobenius=5.0,
        )
        gt = sample_ground_truth(spec, np.random.default_rng(14))
        # left factors are not orthogonal in general; orthonormalize them too
        U = np.stack(gt.decomposition.u_factors, axis=1)
        Q, _ = np.linalg.qr(U)
        us = [Q[:, r] for r in range(4)]
        sig = np.sort(gt.decomposition.sigma)[::-1]
        X = sum(s * np.outer(u, v) for s, u, v in zip(
            gt.decomposition.sigma, us, gt.decomposition.v_factors))
        for p in (2.0 / 3.0, 1.0, 2.0):
            lhs = float(np.sum(sig**p))
            assert schatten_quasi_norm(X, p) ** p == pytest.approx(lhs, rel=1e-8)


class TestGramianConstants:
    def test_orthonormal(self):
        c, C = gramian_constants([np.eye(4)[0], np.eye(4)[1]])
        assert (c, C) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_half_inner_product(self):
        u1 = np.array([1.0, 0.0])
        u2 = np.array([0.5, math.sqrt(3) / 2.0])
        c, C = gramian_constants([u1, u2])
        assert c == pytest.approx(2.0, rel=1e-10)
        assert C == pytest.approx(1.5, rel=1e-10)

    def test_rank_one(self):
        assert gramian_constants([np.eye(3)[1]]) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_rank_deficient_rejected(self):
        u = np.eye(3)[0]
        with pytest.raises(SingularModelError):
            gramian_constants([u, u])


class TestJacobiRoutes:
    def test_eigh_matches_numpy(self):
        rng = np.random.default_rng(15)
        A = rng.standard_normal((9, 9))
        A = A + A.T
        w, V = jacobi_eigh(A)
        w_np = np.sort(np.linalg.eigvalsh(A))[::-1]
        assert np.allclose(w, w_np, atol=1e-10 * max(1.0, abs(w_np).max()))
        assert np.linalg.norm(V @ np.diag(w) @ V.T - A) <= 1e-9

    def test_svd_reconstructs(self):
        rng = np.random.default_rng(16)
        X = rng.standard_normal((6, 13))
        U, s, V = jacobi_svd(X)
        assert np.linalg.norm(U @ np.diag(s) @ V.T - X) <= 1e-9 * np.linalg.norm(X)
        assert np.allclose(np.sort(s), np.sort(np.linalg.svd(X, compute_uv=False)),
                           rtol=1e-9)
