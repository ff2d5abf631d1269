"""HHL linear solver on the statevector simulator, and its two uses here.

The circuit is phase estimation with U = exp(2 pi i A / 2**n), an ancilla
rotation with |1>-amplitude C / lt_k for phase value k (C = 2**-n, the
smallest nonzero bin, so every rotation is valid), then the inverse phase
estimation. Post-selection keeps the branch with ancilla |1> and phase
register |0...0>; with C * 2**n = 1 that branch *is* A^-1 b, so the simulator
returns both the normalized state and the unnormalized solution.

``signed=True`` reads phase values k >= 2**(n-1) as negative eigenvalues
k - 2**n (two's complement), which the hermitian dilation of a general matrix
needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .determinant import ANCILLA, PHASE, SYSTEM, multiplexed_rotation, qpe_forward, qpe_inverse, qpe_unitary, system_width
from .errors import DegenerateSolveError, DimensionMismatchError, NotHermitianError, SingularMatrixError, SpectrumRangeError
from .linalg import MatrixLike, as_array, eig_hermitian, inverse, is_hermitian
from .statevector import GateLog, QubitRegister, prepare_state

DEFAULT_KAPPA_CAP = 32.0


@dataclass
class LinearSolveRun:
    matrix: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    precision: int
    kappa: float
    solution: np.ndarray
    estimate: np.ndarray = field(repr=False)
    success_probability: float
    log: GateLog = field(repr=False)


def _phase_eigenvalue(k: int, n: int, signed: bool) -> int:
    if signed and k >= 1 << (n - 1):
        return k - (1 << n)
    return k


def _check_spectrum(vals, n, signed, kappa_cap):
    mags = np.abs(vals)
    if np.min(mags) < 1e-12:
        raise SingularMatrixError("matrix has a zero eigenvalue")
    if signed:
        if np.max(mags) >= 1 << (n - 1):
            raise SpectrumRangeError(f"|eigenvalue| {np.max(mags):.6g} exceeds signed range 2**{n - 1}")
    else:
        if np.min(vals) <= 0:
            raise SpectrumRangeError("unsigned HHL needs a positive spectrum; use signed=True")
        if np.max(vals) >= 1 << n:
            raise SpectrumRangeError(f"eigenvalue {np.max(vals):.6g} exceeds 2**{n}")
    kappa = float(np.max(mags) / np.min(mags))
    if kappa_cap is not None and kappa > kappa_cap:
        raise SpectrumRangeError(f"condition ratio {kappa:.3g} exceeds cap {kappa_cap:g}")
    return kappa


def spectral_scale(a: MatrixLike, n: int, *, signed: bool = False, fill: float = 0.5) -> float:
    """Uniform factor s putting the spectrum of s*A inside the phase window.

    Integer spectra that already fit keep s = 1 (exact phases). Otherwise the
    largest |eigenvalue| is mapped to ``fill`` of the window, leaving headroom
    against wrap-around leakage.
    """
    vals = eig_hermitian(a).eigenvalues
    limit = float(1 << (n - 1)) if signed else float(1 << n)
    mags = np.abs(vals)
    if np.max(mags) < limit and np.all(np.abs(vals - np.round(vals)) < 1e-9) and np.min(mags) >= 1 - 1e-9:
        return 1.0
    return fill * limit / float(np.max(mags))


def hhl_run(a: MatrixLike, b, n: int, *, signed: bool = False,
            kappa_cap: float | None = DEFAULT_KAPPA_CAP) -> LinearSolveRun:
    arr = np.asarray(as_array(a), dtype=np.complex128)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError("HHL needs a square matrix")
    if not is_hermitian(arr):
        raise NotHermitianError("HHL needs a hermitian matrix (use the dilation in qica_unmix)")
    rhs = np.asarray(b, dtype=np.complex128).reshape(-1)
    if rhs.shape[0] != arr.shape[0]:
        raise DimensionMismatchError(f"rhs length {rhs.shape[0]} vs matrix dim {arr.shape[0]}")
    if abs(np.linalg.norm(rhs) - 1.0) > 1e-9:
        raise ValueError("right-hand side must have unit norm")
    vals = eig_hermitian(arr).eigenvalues
    kappa = _check_spectrum(vals, n, signed, kappa_cap)

    N = arr.shape[0]
    width = system_width(N)
    u = qpe_unitary(arr, n)
    reg = QubitRegister([(PHASE, n), (SYSTEM, width), (ANCILLA, 1)])
    prepare_state(reg, SYSTEM, rhs)
    qpe_forward(reg, u, n)

    def amplitude(k):
        if k == 0:
            return None
        return 1.0 / _phase_eigenvalue(k, n, signed)

    multiplexed_rotation(reg, amplitude)
    qpe_inverse(reg, u, n)

    branch = reg.tensor()[0, :, 1][:N].copy()
    weight = float(np.linalg.norm(branch))
    if weight < 1e-10:
        raise DegenerateSolveError(f"post-selected branch amplitude {weight:.3e} too small")
    return LinearSolveRun(arr, rhs, n, kappa, branch / weight, branch, weight ** 2, reg.log)


def hhl_solve(a: MatrixLike, b, n: int, *, signed: bool = False,
              kappa_cap: float | None = DEFAULT_KAPPA_CAP) -> np.ndarray:
    """Normalized state proportional to A^-1 b.

    ``a`` must be hermitian with spectrum in (0, 2**n) (or |lambda| < 2**(n-1)
    when ``signed``); scale it beforehand with :func:`spectral_scale`.
    """
    return hhl_run(a, b, n, signed=signed, kappa_cap=kappa_cap).solution


def solve(a: MatrixLike, b, n: int, *, kappa_cap: float | None = None) -> np.ndarray:
    """Unnormalized A^-1 b through HHL, handling scaling and non-hermitian A.

    Hermitian positive matrices run directly; hermitian indefinite ones use
    signed phases; anything else goes through the dilation
    [[0, A], [A^dagger, 0]], whose solution for rhs (b, 0) is (0, A^-1 b).
    """
    arr = np.asarray(as_array(a), dtype=np.complex128)
    rhs = np.asarray(b, dtype=np.complex128).reshape(-1)
    norm = float(np.linalg.norm(rhs))
    if norm == 0:
        return np.zeros(arr.shape[1], dtype=np.complex128)
    if is_hermitian(arr):
        signed = bool(np.min(eig_hermitian(arr).eigenvalues) <= 0)
        s = spectral_scale(arr, n, signed=signed)
        run = hhl_run(s * arr, rhs / norm, n, signed=signed, kappa_cap=kappa_cap)
        return run.estimate * (s * norm)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError("solve needs a square matrix")
    d = arr.shape[0]
    dil = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    dil[:d, d:] = arr
    dil[d:, :d] = arr.conj().T
    s = spectral_scale(dil, n, signed=True)
    big = np.concatenate([rhs / norm, np.zeros(d, dtype=np.complex128)])
    run = hhl_run(s * dil, big, n, signed=True, kappa_cap=kappa_cap)
    return run.estimate[d:] * (s * norm)


def qica_unmix(w: MatrixLike | None, x, n: int = 6, *, mixing: MatrixLike | None = None,
               normalize: bool = True) -> np.ndarray:
    """Independent components s = W x, obtained by solving F s = x with HHL (F = W^-1).

    Pass the mixing matrix directly as ``mixing`` when it is known; otherwise
    it is formed classically from ``w``. With ``normalize=False`` the
    magnitude of s is restored from the post-selection amplitude.
    """
    if mixing is None:
        if w is None:
            raise ValueError("need the unmixing matrix w or the mixing matrix")
        mixing = inverse(w)
    f = np.asarray(as_array(mixing), dtype=np.complex128)
    s = solve(f, x, n)
    if normalize:
        nrm = np.linalg.norm(s)
        if nrm == 0:
            raise DegenerateSolveError("zero solution")
        return s / nrm
    return s


def matrix_ratio(x: MatrixLike, y: MatrixLike, n: int = 6, *, path: str = "quantum",
                 kappa_cap: float | None = None):
    """X Y^-1. ``path='quantum'`` builds Y^-1 column by column with HHL; ``'oracle'`` uses Gauss-Jordan."""
    xa = np.asarray(as_array(x), dtype=np.complex128)
    ya = np.asarray(as_array(y), dtype=np.complex128)
    if xa.shape[1] != ya.shape[0] or ya.shape[0] != ya.shape[1]:
        raise DimensionMismatchError(f"cannot form X Y^-1 for shapes {xa.shape}, {ya.shape}")
    if path == "oracle":
        return xa @ inverse(ya)
    if path != "quantum":
        raise ValueError(f"unknown path {path!r}")
    d = ya.shape[0]
    vals = eig_hermitian(ya).eigenvalues
    if np.min(vals) <= 0:
        raise SingularMatrixError("Y must be positive definite")
    s = spectral_scale(ya, n)
    cols = []
    for k in range(d):
        e = np.zeros(d, dtype=np.complex128)
        e[k] = 1.0
        cols.append(hhl_run(s * ya, e, n, kappa_cap=kappa_cap).estimate * s)
    return xa @ np.column_stack(cols)


def planted_sources(num_sources: int, samples: int, rng: np.random.Generator):
    """Independent non-Gaussian toy sources (rows) for unmixing checks."""
    t = np.linspace(0, 1, samples)
    kinds = [
        lambda i: np.sign(np.sin(2 * math.pi * (3 + i) * t)),
        lambda i: ((t * (5 + i)) % 1.0) * 2 - 1,
        lambda i: np.sin(2 * math.pi * (7 + 2 * i) * t),
        lambda i: rng.uniform(-1, 1, samples),
    ]
    return np.vstack([kinds[i % len(kinds)](i) for i in range(num_sources)])
