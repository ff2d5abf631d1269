"""Eigenfaces by phase estimation on exp(-i C t).

C = (1/M) sum_i |x_i><x_i| is built from unit-norm faces without mean
subtraction, so the leading eigenface plays the role of the mean image.
Eigenvectors come from the classical oracle (via the M x M Gram matrix, which
shares the nonzero spectrum); phase estimation supplies the eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .determinant import PHASE, SYSTEM, system_width
from .errors import DimensionMismatchError, EmptyInputError, PhaseWrapError
from .linalg import MatrixLike, as_array, eig_hermitian
from .statevector import QubitRegister, apply_controlled_unitary_power, apply_hadamard_block, apply_qft, prepare_state

RANK_TOL = 1e-12


@dataclass(frozen=True)
class TrainingSet:
    """M unit-norm face vectors (rows) of common dimension N."""

    vectors: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.vectors)
        if v.ndim != 2 or v.shape[0] == 0:
            raise EmptyInputError("training set needs at least one face vector")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("training vectors must be unit norm; use TrainingSet.from_images")
        if self.labels and len(self.labels) != v.shape[0]:
            raise DimensionMismatchError("one label per face required")

    @classmethod
    def from_images(cls, images, labels=()) -> "TrainingSet":
        rows = []
        for img in images:
            vec = np.asarray(img, dtype=np.float64).reshape(-1)
            nrm = np.linalg.norm(vec)
            if nrm == 0:
                raise ValueError("cannot normalize an all-zero face")
            rows.append(vec / nrm)
        if not rows:
            raise EmptyInputError("no images supplied")
        return cls(np.vstack(rows), tuple(labels))

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    @property
    def N(self) -> int:
        return self.vectors.shape[1]


@dataclass
class EigenfaceBasis:
    eigenfaces: np.ndarray  # columns, orthonormal
    eigenvalues: np.ndarray  # oracle values, descending
    qpe_eigenvalues: np.ndarray  # decoded from the most probable phase bin
    precision: int
    time: float
    phase_distribution: np.ndarray = field(repr=False)  # QPE outcome distribution for the ensemble C
    scores: np.ndarray | None = field(default=None, repr=False)
    order: np.ndarray | None = None  # indices into the unselected basis
    mean_image: int = 0  # column of the largest-eigenvalue eigenface

    @property
    def r(self) -> int:
        return self.eigenfaces.shape[1]

    def bin_width(self) -> float:
        """Eigenvalue resolution of one phase bin."""
        return 2 * math.pi / self.time / (1 << self.precision)


def build_covariance(ts: TrainingSet) -> np.ndarray:
    """C = (1/M) sum_i |x_i><x_i| (no centering)."""
    x = np.asarray(ts.vectors, dtype=np.complex128)
    if x.shape[0] == 0:
        raise EmptyInputError("empty training set")
    return (x.T @ x.conj()) / x.shape[0]


def _principal_eigen(c: np.ndarray, ts: TrainingSet | None):
    if ts is not None and ts.M < c.shape[0]:
        # Gram trick: C = X^T X* / M and G = X* X^T / M share nonzero eigenvalues
        x = np.asarray(ts.vectors, dtype=np.complex128)
        g = (x.conj() @ x.T) / ts.M
        g = 0.5 * (g + g.conj().T)
        vals, w = eig_hermitian(g)
        keep = vals > RANK_TOL
        vals, w = vals[keep], w[:, keep]
        vecs = (x.T @ w) / np.sqrt(ts.M * vals)
        vecs /= np.linalg.norm(vecs, axis=0)
        return vals, vecs
    vals, vecs = eig_hermitian(c)
    keep = vals > RANK_TOL
    return vals[keep], vecs[:, keep]


def default_time(upper: float = 1.0) -> float:
    """t = pi / lambda_upper; with unit trace every phase magnitude stays below 1/2."""
    return math.pi / upper


def _qpe_distribution(u, vec, n, width):
    reg = QubitRegister([(PHASE, n), (SYSTEM, width)])
    prepare_state(reg, SYSTEM, vec)
    apply_hadamard_block(reg, PHASE)
    for l in range(1, n + 1):
        apply_controlled_unitary_power(reg, reg.qubit(PHASE, l - 1), SYSTEM, u, 1 << (n - l))
    apply_qft(reg, PHASE, inverse=True)
    return reg.probabilities(PHASE)


def decode_phase(k: int, n: int, t: float) -> float:
    """Eigenvalue for phase bin k under U = exp(-i C t): lambda = 2 pi ((-k) mod 2**n) / (2**n t)."""
    return 2 * math.pi * ((-k) % (1 << n)) / ((1 << n) * t)


def qpca_eigenfaces(c: MatrixLike, n: int, t: float | None = None, *,
                    training: TrainingSet | None = None) -> EigenfaceBasis:
    """Phase-estimate the nonzero eigenvalues of C on U = exp(-i C t).

    Each oracle eigenvector is loaded into the system register in turn; the
    most probable phase bin gives its eigenvalue. The ensemble distribution
    (the outcome statistics for input state C itself) is the
    eigenvalue-weighted mix of those runs. Pass ``training`` to get
    eigenvectors through the M x M Gram matrix when M < N.
    """
    arr = np.asarray(as_array(c), dtype=np.complex128)
    t = default_time() if t is None else float(t)
    vals, vecs = _principal_eigen(arr, training)
    if vals.size and np.max(vals) * t >= 2 * math.pi:
        raise PhaseWrapError(f"lambda*t = {np.max(vals) * t:.4g} >= 2 pi wraps the phase")
    width = system_width(arr.shape[0])
    # C has eigenvalue 0 off its principal subspace, so exp(-iCt) = I + V (exp(-i lambda t) - 1) V^dagger
    v = np.zeros((1 << width, vals.size), dtype=np.complex128)
    v[: arr.shape[0]] = vecs
    u = np.eye(1 << width, dtype=np.complex128) + (v * (np.exp(-1j * t * vals) - 1.0)) @ v.conj().T

    dist = np.zeros(1 << n)
    estimates = []
    for j in range(vals.size):
        p = _qpe_distribution(u, vecs[:, j], n, width)
        dist += vals[j] * p
        estimates.append(decode_phase(int(np.argmax(p)), n, t))
    return EigenfaceBasis(
        eigenfaces=vecs,
        eigenvalues=vals,
        qpe_eigenvalues=np.array(estimates),
        precision=n,
        time=t,
        phase_distribution=dist,
        order=np.arange(vals.size),
        mean_image=0,
    )


def scores(ts: TrainingSet, basis: EigenfaceBasis) -> np.ndarray:
    """s[i, j] = <x_i | phi_j>."""
    x = np.asarray(ts.vectors, dtype=np.complex128)
    if x.shape[1] != basis.eigenfaces.shape[0]:
        raise DimensionMismatchError(f"face dim {x.shape[1]} vs eigenface dim {basis.eigenfaces.shape[0]}")
    return x.conj() @ basis.eigenfaces


def select_principal(basis: EigenfaceBasis, r: int, score_matrix: np.ndarray | None = None) -> EigenfaceBasis:
    """Keep the r eigenfaces with the highest max-|score| over the training faces.

    Ties fall back to larger eigenvalue, then lower index. Without a score
    matrix the ranking is by eigenvalue alone.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if r > basis.r:
        raise ValueError(f"r={r} exceeds the {basis.r} available eigenfaces")
    sc = basis.scores if score_matrix is None else score_matrix
    peak = np.max(np.abs(sc), axis=0) if sc is not None else np.zeros(basis.r)
    ranking = sorted(range(basis.r), key=lambda j: (-float(peak[j]), -basis.eigenvalues[j], j))
    keep = np.array(ranking[:r])
    top = int(np.argmax(basis.eigenvalues))
    mean_pos = int(np.flatnonzero(keep == top)[0]) if top in keep else -1
    return replace(
        basis,
        eigenfaces=basis.eigenfaces[:, keep],
        eigenvalues=basis.eigenvalues[keep],
        qpe_eigenvalues=basis.qpe_eigenvalues[keep],
        scores=None if sc is None else sc[:, keep],
        order=basis.order[keep],
        mean_image=mean_pos,
    )


@dataclass(frozen=True)
class Expansion:
    weights: np.ndarray
    reconstruction: np.ndarray
    residual: float


def expand_face(x, basis: EigenfaceBasis) -> Expansion:
    """omega_j = <phi_j|x>, reconstruction sum_j omega_j |phi_j>, residual norm."""
    if basis.r == 0:
        raise ValueError("empty eigenface basis")
    vec = np.asarray(x, dtype=np.complex128).reshape(-1)
    if vec.shape[0] != basis.eigenfaces.shape[0]:
        raise DimensionMismatchError("face and eigenface dimensions differ")
    w = basis.eigenfaces.conj().T @ vec
    rec = basis.eigenfaces @ w
    return Expansion(w, rec, float(np.linalg.norm(vec - rec)))
