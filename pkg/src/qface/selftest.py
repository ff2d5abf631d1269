"""Quick invariant checks runnable from an installed package."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .determinant import determinant_quantum, run_determinant
from .divergence import logdet_divergence, prepare_face_matrix
from .ghost import GhostConfig, synthesize
from .hhl import hhl_solve
from .linalg import det_classical, eig_hermitian, inverse
from .qpca import TrainingSet, build_covariance, qpca_eigenfaces
from .statevector import QubitRegister, apply_qft, fidelity
from .trace_circuit import BinaryEncodedDiagonal, adder_sigma, fourier_value, phi_encode, trace_quantum


def _random_hermitian(rng, dim, spectrum):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q @ np.diag(spectrum) @ q.conj().T


def check_qft():
    reg = QubitRegister.basis([("q", 3)], {"q": 5})
    apply_qft(reg, "q")
    expected = np.exp(2j * math.pi * 5 * np.arange(8) / 8) / math.sqrt(8)
    return np.allclose(reg.amplitudes, expected, atol=1e-12) and reg.log.total() == 6


def check_adder():
    for a in range(16):
        for b in range(16):
            reg = phi_encode(b, 5)
            if fourier_value(adder_sigma(a, reg)) != a + b:
                return False
    return True


def check_trace():
    rng = np.random.default_rng(1)
    for _ in range(20):
        vals = rng.integers(0, 32, rng.integers(1, 9))
        if trace_quantum(BinaryEncodedDiagonal.from_values(vals)) != int(vals.sum()):
            return False
    return True


def check_determinant():
    rng = np.random.default_rng(2)
    for dim, n in ((2, 3), (4, 4)):
        a = _random_hermitian(rng, dim, rng.integers(1, 1 << n, dim).astype(float))
        run = run_determinant(a, n)
        if abs(run.determinant - det_classical(a)) > 1e-6 * abs(det_classical(a)):
            return False
        if abs(run.product_amplitude - np.prod(run.lambda_tilde)) > 1e-9:
            return False
    return abs(determinant_quantum(np.diag([1.0, 2.0]), 2) - 2.0) < 1e-9


def check_hhl():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([1.0, 0.0])
    return fidelity(hhl_solve(a, b, 3), inverse(a) @ b) >= 0.999


def check_qpca():
    rng = np.random.default_rng(3)
    ts = TrainingSet.from_images(rng.random((4, 4)))
    c = build_covariance(ts)
    basis = qpca_eigenfaces(c, 6)
    return abs(np.trace(c).real - 1) < 1e-10 and np.all(np.abs(basis.qpe_eigenvalues - basis.eigenvalues) <= basis.bin_width())


def check_divergence():
    if abs(logdet_divergence(2 * np.eye(2), np.eye(2)).value - (2 - 2 * math.log(2))) > 1e-9:
        return False
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = prepare_face_matrix(rng.random(16), 0.1, 0.05)
        y = prepare_face_matrix(rng.random(16), 0.1, 0.05)
        if logdet_divergence(x, y).value < -1e-9 or abs(logdet_divergence(x, x).value) > 1e-9:
            return False
        if np.min(eig_hermitian(x.matrix).eigenvalues) < 0.025:
            return False
    return True


def check_ghost():
    t = np.ones((4, 4))
    img = synthesize(t, GhostConfig(frames=10, pairs_per_frame=16, seed=5))
    again = synthesize(t, GhostConfig(frames=10, pairs_per_frame=16, seed=5))
    covered = img.illumination > 0
    return np.all(img.estimate[covered] == 1.0) and np.array_equal(img.counts, again.counts)


CHECKS: dict[str, Callable[[], bool]] = {
    "qft": check_qft,
    "adder": check_adder,
    "trace": check_trace,
    "determinant": check_determinant,
    "hhl": check_hhl,
    "qpca": check_qpca,
    "divergence": check_divergence,
    "ghost": check_ghost,
}


def run_selftest(report=print) -> bool:
    ok = True
    for name, check in CHECKS.items():
        try:
            passed = bool(check())
            detail = ""
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f" ({type(exc).__name__}: {exc})"
        ok &= passed
        report(f"{'PASS' if passed else 'FAIL'} {name}{detail}")
    report(f"{len(CHECKS)} checks, {'all passed' if ok else 'failures present'}")
    return ok
