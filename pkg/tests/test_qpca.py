import math

import numpy as np
import pytest

from qface.errors import DimensionMismatchError, EmptyInputError, PhaseWrapError
from qface.linalg import eig_hermitian
from qface.qpca import (
    TrainingSet,
    build_covariance,
    decode_phase,
    expand_face,
    qpca_eigenfaces,
    scores,
    select_principal,
)


def seeded_set(rng, m, n):
    return TrainingSet.from_images(rng.random((m, n)))


class TestCovariance:
    def test_single_face_projector(self):
        ts = TrainingSet.from_images([[3.0, 4.0]])
        c = build_covariance(ts)
        np.testing.assert_allclose(c, np.outer([0.6, 0.8], [0.6, 0.8]))
        np.testing.assert_allclose(eig_hermitian(c).eigenvalues, [1, 0], atol=1e-12)

    def test_orthogonal_pair(self):
        c = build_covariance(TrainingSet.from_images([[1.0, 0, 0], [0, 1.0, 0]]))
        np.testing.assert_allclose(c, np.diag([0.5, 0.5, 0]))

    def test_seeded_trace_psd(self, rng):
        c = build_covariance(seeded_set(rng, 4, 6))
        assert abs(np.trace(c) - 1) <= 1e-10
        assert np.min(eig_hermitian(c).eigenvalues) >= -1e-12

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            TrainingSet.from_images([])

    def test_unit_norm_enforced(self):
        with pytest.raises(ValueError):
            TrainingSet(np.array([[1.0, 1.0]]))


class TestEigenfaces:
    def test_diag_half_half(self):
        basis = qpca_eigenfaces(np.diag([0.5, 0.5]), 3)
        # U = exp(-i pi/2): phase -1/4 -> bin 6 of 8
        assert np.argmax(basis.phase_distribution) == 6
        assert basis.phase_distribution[6] == pytest.approx(1)
        np.testing.assert_allclose(basis.qpe_eigenvalues, [0.5, 0.5])

    def test_rank_one_single_peak(self):
        v = np.array([0.6, 0.0, 0.8, 0.0])
        basis = qpca_eigenfaces(np.outer(v, v), 4)
        assert basis.r == 1
        assert np.count_nonzero(basis.phase_distribution > 1e-12) == 1
        assert basis.qpe_eigenvalues[0] == pytest.approx(1)

    @pytest.mark.parametrize("m", [2, 4])
    def test_within_one_bin(self, rng, m):
        ts = seeded_set(rng, m, 4)
        basis = qpca_eigenfaces(build_covariance(ts), 5)
        assert np.all(np.abs(basis.qpe_eigenvalues - basis.eigenvalues) <= basis.bin_width())
        assert basis.eigenvalues.sum() == pytest.approx(1, abs=1e-9)
        np.testing.assert_allclose(basis.eigenfaces.conj().T @ basis.eigenfaces, np.eye(basis.r), atol=1e-9)

    def test_gram_path_matches_direct(self, rng):
        ts = seeded_set(rng, 3, 16)
        c = build_covariance(ts)
        a = qpca_eigenfaces(c, 4)
        b = qpca_eigenfaces(c, 4, training=ts)
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)
        overlap = np.abs(a.eigenfaces.conj().T @ b.eigenfaces)
        np.testing.assert_allclose(overlap, np.eye(3), atol=1e-8)

    def test_phase_wrap(self):
        with pytest.raises(PhaseWrapError):
            qpca_eigenfaces(np.diag([1.0, 0.0]), 3, t=2 * math.pi)

    def test_decode(self):
        assert decode_phase(0, 3, math.pi) == 0
        assert decode_phase(4, 3, math.pi) == pytest.approx(1)


class TestScoresAndSelection:
    def test_eigenface_scores(self, rng):
        ts = seeded_set(rng, 3, 5)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        probe = TrainingSet(np.real_if_close(basis.eigenfaces[:, :1].T))
        s = scores(probe, basis)
        np.testing.assert_allclose(np.abs(s[0]), np.eye(basis.r)[0], atol=1e-9)

    def test_bessel(self, rng):
        ts = seeded_set(rng, 4, 6)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        assert np.all(np.sum(np.abs(scores(ts, basis)) ** 2, axis=1) <= 1 + 1e-9)

    def test_dimension_mismatch(self, rng):
        basis = qpca_eigenfaces(build_covariance(seeded_set(rng, 2, 4)), 3)
        with pytest.raises(DimensionMismatchError):
            scores(seeded_set(rng, 2, 5), basis)

    def test_select_all_and_zero(self, rng):
        ts = seeded_set(rng, 3, 4)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        basis.scores = scores(ts, basis)
        full = select_principal(basis, basis.r)
        assert sorted(full.order) == list(range(basis.r))
        with pytest.raises(ValueError):
            select_principal(basis, 0)

    def test_select_matches_classical_ranking(self, rng):
        ts = seeded_set(rng, 4, 8)
        c = build_covariance(ts)
        basis = qpca_eigenfaces(c, 5)
        sc = scores(ts, basis)
        chosen = select_principal(basis, 2, sc)
        # independent classical PCA: numpy eigh + projections
        w, v = np.linalg.eigh(c)
        keep = w > 1e-12
        proj = np.abs(ts.vectors @ v[:, keep].conj())
        peak = proj.max(axis=0)
        ref_vals = w[keep][np.argsort(-peak, kind="stable")[:2]]
        np.testing.assert_allclose(np.sort(chosen.eigenvalues), np.sort(ref_vals), atol=1e-10)

    def test_rescaling_invariance(self, rng):
        ts = seeded_set(rng, 4, 6)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        sc = scores(ts, basis)
        a = select_principal(basis, 2, sc)
        b = select_principal(basis, 2, 7.5 * sc)
        np.testing.assert_array_equal(a.order, b.order)

    def test_mean_image_is_top(self, rng):
        ts = seeded_set(rng, 4, 6)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        chosen = select_principal(basis, 2, scores(ts, basis))
        if 0 in chosen.order:
            assert chosen.order[chosen.mean_image] == 0


class TestExpansion:
    def test_in_span(self, rng):
        ts = seeded_set(rng, 3, 6)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        exp = expand_face(ts.vectors[1], basis)
        assert exp.residual == pytest.approx(0, abs=1e-9)

    def test_orthogonal(self):
        basis = qpca_eigenfaces(build_covariance(TrainingSet.from_images([[1.0, 0, 0]])), 3)
        exp = expand_face([0, 1.0, 0], basis)
        np.testing.assert_allclose(exp.reconstruction, 0)

    def test_parseval_and_monotone(self, rng):
        ts = seeded_set(rng, 5, 10)
        basis = qpca_eigenfaces(build_covariance(ts), 4)
        basis.scores = scores(ts, basis)
        x = rng.random(10)
        x /= np.linalg.norm(x)
        res = []
        for r in range(1, basis.r + 1):
            e = expand_face(x, select_principal(basis, r))
            assert e.residual ** 2 == pytest.approx(1 - np.sum(np.abs(e.weights) ** 2), abs=1e-9)
            res.append(e.residual)
        assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
