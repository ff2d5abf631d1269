import os
import subprocess
import sys

import numpy as np
import pytest

from qface import _accel, kernels


def test_flag_selects_backend():
    code = "from qface import _accel; print(_accel.USE_NUMBA)"
    env = dict(os.environ, QFACE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
    env["QFACE_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == str(_accel.HAVE_NUMBA)


@pytest.mark.parametrize("targets,controls,values", [
    ([0], [], None),
    ([4], [1], None),
    ([2, 0], [3], [0]),
    ([1, 3], [0, 4], [1, 0]),
    ([0, 1, 2], [], None),
])
def test_apply_matrix_equivalent(rng, targets, controls, values):
    nq = 5
    state = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
    dim = 1 << len(targets)
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a, b = state.copy(), state.copy()
    kernels.apply_matrix_numba(a, mat, targets, controls, values, nq)
    kernels.apply_matrix_numpy(b, mat, targets, controls, values, nq)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_apply_matrix_against_kron(rng):
    nq = 3
    state = rng.normal(size=8) + 0j
    mat = rng.normal(size=(2, 2))
    expected = np.kron(np.kron(np.eye(2), mat), np.eye(2)) @ state
    out = state.copy()
    kernels.apply_matrix(out, mat, [1], nqubits=nq)
    np.testing.assert_allclose(out, expected, atol=1e-14)


@pytest.mark.parametrize("dim", [1, 3, 8, 20])
def test_jacobi_equivalent(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a = a + a.conj().T
    w1, v1 = kernels.jacobi_eigh_numba(a)
    w2, v2 = kernels.jacobi_eigh_numpy(a)
    np.testing.assert_allclose(np.sort(w1), np.sort(w2), atol=1e-10)
    for w, v in ((w1, v1), (w2, v2)):
        np.testing.assert_allclose(a @ v, v * w, atol=1e-9)


def test_coincidences_equivalent(rng):
    n = 5000
    obj = rng.integers(0, 64, n)
    cam = np.where(rng.random(n) < 0.9, rng.integers(0, 64, n), -1)
    t = rng.random(64)
    u = rng.random(n)
    c1, i1 = kernels.coincidences_numba(obj, cam, t, u)
    c2, i2 = kernels.coincidences_numpy(obj, cam, t, u)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_array_equal(i1, i2)
    assert i1.sum() == n
