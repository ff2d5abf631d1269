import math

import numpy as np
import pytest

from qface.errors import DimensionMismatchError, EmptyInputError
from qface.divergence import (
    FaceMatrix,
    divergence_error_bound,
    fixed_point_diagonal,
    frobenius_distance,
    logdet_divergence,
    match_face,
    prepare_face_matrix,
    quantum_trace,
)
from qface.linalg import eig_hermitian


def real_spd(rng, dim, spectrum):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q @ np.diag(spectrum) @ q.T


class TestPrepare:
    def test_all_ones(self):
        fm = prepare_face_matrix(np.ones(9), 0.0, 0.1)
        np.testing.assert_allclose(fm.matrix, np.ones((3, 3)) + 0.1 * np.eye(3), atol=1e-12)

    def test_tau_one_gives_eps_identity(self, rng):
        fm = prepare_face_matrix(rng.random(16), 1.0, 0.05)
        np.testing.assert_array_equal(fm.matrix, 0.05 * np.eye(4))

    def test_seeded_spd(self, rng):
        face = rng.random(64)
        fm = prepare_face_matrix(face, 0.1, 0.05)
        np.testing.assert_allclose(fm.matrix, fm.matrix.T)
        assert np.min(eig_hermitian(fm.matrix).eigenvalues) >= 0.05 / 2

    def test_sparsified_entries_are_zero(self):
        face = np.array([1.0, 0.05, 0.05, 0.5])
        fm = prepare_face_matrix(face, 0.1, 1.0)
        assert fm.matrix[0, 1] == 0 and fm.matrix[1, 0] == 0

    def test_non_square(self):
        with pytest.raises(DimensionMismatchError):
            prepare_face_matrix(np.ones(10), 0.0, 0.1)

    def test_default_eps(self):
        fm = prepare_face_matrix(np.eye(3).reshape(-1), 0.0)
        assert fm.eps == pytest.approx(0.05)


class TestDivergence:
    def test_identical(self, rng):
        x = real_spd(rng, 4, [1, 2, 3, 4])
        assert abs(logdet_divergence(x, x).value) <= 1e-9

    def test_closed_form(self):
        assert logdet_divergence(2 * np.eye(2), np.eye(2)).value == pytest.approx(2 - 2 * math.log(2), abs=1e-9)

    def test_asymmetric(self):
        a = logdet_divergence(2 * np.eye(2), np.eye(2)).value
        b = logdet_divergence(np.eye(2), 2 * np.eye(2)).value
        assert b == pytest.approx(1 + 2 * math.log(2) - 2)
        assert a != pytest.approx(b)

    def test_against_numpy_oracle(self, rng):
        x, y = real_spd(rng, 5, rng.uniform(0.5, 2, 5)), real_spd(rng, 5, rng.uniform(0.5, 2, 5))
        a = x @ np.linalg.inv(y)
        ref = np.trace(a) - np.linalg.slogdet(a)[1] - 5
        assert logdet_divergence(x, y).value == pytest.approx(ref, abs=1e-10)

    def test_nonnegative_property(self, rng):
        for _ in range(100):
            dim = int(rng.integers(2, 6))
            x, y = real_spd(rng, dim, rng.uniform(0.1, 5, dim)), real_spd(rng, dim, rng.uniform(0.1, 5, dim))
            assert logdet_divergence(x, y).value >= -1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            logdet_divergence(np.eye(2), np.eye(3))

    def test_bad_backend(self):
        with pytest.raises(ValueError):
            logdet_divergence(np.eye(2), np.eye(2), "analog")

    @pytest.mark.parametrize("dim", [2, 4])
    def test_quantum_exact_spectra(self, rng, dim):
        x = real_spd(rng, dim, rng.integers(1, 16, dim).astype(float))
        y = real_spd(rng, dim, rng.integers(1, 16, dim).astype(float))
        c = logdet_divergence(x, y)
        q = logdet_divergence(x, y, "quantum", n=4)
        assert abs(q.value - c.value) <= q.error_bound
        assert q.gate_counts["total"] > 0
        assert q.logdet_term == pytest.approx(c.logdet_term, abs=1e-9)

    def test_quantum_non_exact_within_bound(self, rng):
        x = real_spd(rng, 2, [0.7, 1.9])
        y = real_spd(rng, 2, [1.1, 2.6])
        c = logdet_divergence(x, y)
        q = logdet_divergence(x, y, "quantum", n=6)
        assert abs(q.value - c.value) <= divergence_error_bound(x, y, 6)

    def test_fixed_point_trace(self):
        a = np.diag([1.5, -0.25, 2.0])
        ints, offset = fixed_point_diagonal(np.diag(a), 4)
        assert offset == 0.25 and ints == [28, 0, 36]
        tr, _ = quantum_trace(a, 4)
        assert tr == pytest.approx(3.25)

    def test_frobenius_baseline(self):
        assert frobenius_distance(np.eye(2), 2 * np.eye(2)) == pytest.approx(math.sqrt(2))


class TestMatch:
    def _db(self, rng, k=8, side=4):
        faces = [rng.random(side * side) for _ in range(k)]
        return faces, [prepare_face_matrix(f, 0.1, 0.05) for f in faces]

    def test_self_match(self, rng):
        faces, db = self._db(rng)
        for i, m in enumerate(db):
            res = match_face(m, db)
            assert res.best == i and res.divergences[i] <= 1e-9

    def test_single_entry(self, rng):
        _, db = self._db(rng, 1)
        assert match_face(db[0], db).best == 0

    def test_perturbed_query(self, rng):
        faces, db = self._db(rng)
        q = prepare_face_matrix(faces[5] + 0.02 * rng.normal(size=16), 0.1, 0.05)
        res = match_face(q, db)
        assert res.best == 5
        assert res.ranking[0] == 5 and list(np.argsort(res.divergences, kind="stable")) == res.ranking

    def test_duplicates_do_not_change_ranking(self, rng):
        faces, db = self._db(rng)
        q = prepare_face_matrix(faces[2] + 0.02 * rng.normal(size=16), 0.1, 0.05)
        base = match_face(q, db)
        loser = base.ranking[-1]
        more = match_face(q, db + [db[loser], db[loser]])
        assert more.best == base.best
        assert more.ranking[:len(db) - 1] == base.ranking[:-1]

    def test_ties_break_by_index(self):
        db = [FaceMatrix(np.eye(2), 0, 1), FaceMatrix(np.eye(2), 0, 1)]
        assert match_face(np.eye(2), db).ranking == [0, 1]

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            match_face(np.eye(2), [])
