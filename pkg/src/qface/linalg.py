"""Dense/sparse matrix container and the classical oracles.

Everything here is brute force and meant for desk-scale matrices (N <= 64).
The quantum modules are checked against these routines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, NotHermitianError, SingularMatrixError

HERMITIAN_TOL = 1e-12


class Matrix:
    """Immutable complex matrix stored dense or as a coordinate list.

    The ``hermitian`` flag is computed on construction, never taken from the
    caller.
    """

    __slots__ = ("_dense", "_coo", "storage", "hermitian")

    def __init__(self, data, storage: str = "dense"):
        arr = np.array(data, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatchError(f"matrix must be 2-D and non-empty, got shape {arr.shape}")
        if storage not in ("dense", "sparse"):
            raise ValueError(f"unknown storage kind {storage!r}")
        arr.setflags(write=False)
        self._dense = arr
        self.storage = storage
        self._coo = None
        if storage == "sparse":
            rows, cols = np.nonzero(arr)
            self._coo = (rows, cols, arr[rows, cols])
        self.hermitian = _is_hermitian(arr)

    @classmethod
    def from_coo(cls, shape, rows, cols, values) -> "Matrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.complex128)
        if not (rows.shape == cols.shape == values.shape):
            raise DimensionMismatchError("rows, cols and values must have equal length")
        keys = set(zip(rows.tolist(), cols.tolist()))
        if len(keys) != len(rows):
            raise ValueError("duplicate coordinates in sparse input")
        dense = np.zeros(shape, dtype=np.complex128)
        dense[rows, cols] = values
        return cls(dense, storage="sparse")

    @property
    def shape(self):
        return self._dense.shape

    @property
    def rows(self) -> int:
        return self._dense.shape[0]

    @property
    def cols(self) -> int:
        return self._dense.shape[1]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self._dense))

    def coo(self):
        """``(rows, cols, values)`` of the nonzero entries."""
        if self._coo is not None:
            return self._coo
        rows, cols = np.nonzero(self._dense)
        return rows, cols, self._dense[rows, cols]

    def to_dense(self) -> np.ndarray:
        return self._dense

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._dense.copy() if copy else self._dense
        return self._dense.astype(dtype)

    def __repr__(self):
        return f"Matrix(shape={self.shape}, storage={self.storage!r}, hermitian={self.hermitian})"


MatrixLike = Union[Matrix, np.ndarray, list]


def _is_hermitian(arr: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    if arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol)


def as_array(a: MatrixLike) -> np.ndarray:
    if isinstance(a, Matrix):
        return a.to_dense()
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def is_hermitian(a: MatrixLike, tol: float = HERMITIAN_TOL) -> bool:
    if isinstance(a, Matrix) and tol == HERMITIAN_TOL:
        return a.hermitian
    return _is_hermitian(as_array(a), tol)


def _require_square(arr):
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {arr.shape}")


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order; ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))

    def __len__(self):
        return len(self.eigenvalues)


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size == 0:
        return vec
    first = vec[nz[0]]
    return vec * (abs(first) / first)


def eig_hermitian(a: MatrixLike, *, tie_tol: float = 1e-9) -> EigenDecomposition:
    """Cyclic-Jacobi eigendecomposition of a hermitian matrix.

    Eigenvalues come back descending. Each eigenvector has its first nonzero
    component made real-positive; within a group of (numerically) equal
    eigenvalues, vectors are ordered lexicographically by
    ``(real, imag)`` components.
    """
    arr = as_array(a)
    _require_square(arr)
    if not is_hermitian(a):
        raise NotHermitianError("eig_hermitian requires a hermitian matrix")
    w, v = kernels.jacobi_eigh(arr)
    v = np.column_stack([_canonical_phase(v[:, j]) for j in range(v.shape[1])])

    def key(j):
        comps = []
        for z in v[:, j]:
            comps.extend((round(z.real, 9), round(z.imag, 9)))
        return tuple(comps)

    order = sorted(range(len(w)), key=lambda j: -w[j])
    # group near-equal eigenvalues, then sort each group by vector
    groups, current = [], [order[0]]
    for j in order[1:]:
        if abs(w[j] - w[current[0]]) <= tie_tol * max(1.0, abs(w[current[0]])):
            current.append(j)
        else:
            groups.append(current)
            current = [j]
    groups.append(current)
    final = [j for g in groups for j in sorted(g, key=key)]
    return EigenDecomposition(w[final].copy(), v[:, final].copy())


def lu_decompose(a: MatrixLike):
    """Doolittle LU with partial pivoting. Returns ``(lu, perm, sign)``.

    A pivot of exactly zero leaves that column untouched; callers decide
    whether that is singular.
    """
    arr = np.array(as_array(a), dtype=np.complex128, copy=True)
    _require_square(arr)
    n = arr.shape[0]
    perm = np.arange(n)
    sign = 1
    for k in range(n):
        p = k + int(np.argmax(np.abs(arr[k:, k])))
        if p != k:
            arr[[k, p]] = arr[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = arr[k, k]
        if pivot == 0:
            continue
        arr[k + 1 :, k] /= pivot
        arr[k + 1 :, k + 1 :] -= np.outer(arr[k + 1 :, k], arr[k, k + 1 :])
    return arr, perm, sign


def det_classical(a: MatrixLike) -> complex:
    """Determinant by LU elimination with partial pivoting (singular gives 0)."""
    lu, _, sign = lu_decompose(a)
    return complex(sign * np.prod(np.diag(lu)))


def slogdet_classical(a: MatrixLike):
    """``(sign, log|det|)`` from the LU pivots; avoids under/overflow."""
    lu, _, sign = lu_decompose(a)
    d = np.diag(lu)
    if np.any(d == 0):
        return 0j, -np.inf
    phase = sign * np.prod(d / np.abs(d))
    return complex(phase), float(np.sum(np.log(np.abs(d))))


def trace_classical(a: MatrixLike) -> complex:
    arr = as_array(a)
    _require_square(arr)
    total = 0j
    for i in range(arr.shape[0]):
        total += arr[i, i]
    return complex(total)


def inverse(a: MatrixLike) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot drops below
    ``1e-14 * max|A|``.
    """
    arr = np.array(as_array(a), dtype=np.complex128, copy=True)
    _require_square(arr)
    n = arr.shape[0]
    scale = np.max(np.abs(arr))
    if scale == 0:
        raise SingularMatrixError("zero matrix is singular")
    aug = np.hstack([arr, np.eye(n, dtype=np.complex128)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[p, k]) < 1e-14 * scale:
            raise SingularMatrixError(f"pivot {abs(aug[p, k]):.3e} below threshold at column {k}")
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        aug[k] /= aug[k, k]
        col = aug[:, k].copy()
        col[k] = 0
        aug -= np.outer(col, aug[k])
    return aug[:, n:]


def real_if_close(arr, tol: float = 1e-10):
    """Drop the imaginary part when every entry's is below ``tol``."""
    arr = np.asarray(arr)
    if np.iscomplexobj(arr) and np.all(np.abs(arr.imag) <= tol):
        return arr.real.copy()
    return arr


def hermitian_part(a: MatrixLike) -> np.ndarray:
    arr = as_array(a)
    return 0.5 * (arr + arr.conj().T)


def unitary_with_first_column(vec) -> np.ndarray:
    """A unitary whose first column is the unit vector ``vec`` (state preparation)."""
    vec = np.asarray(vec, dtype=np.complex128)
    n = vec.shape[0]
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("cannot prepare the zero vector")
    vec = vec / norm
    # Householder reflection mapping e0 -> vec, up to the phase of vec[0]
    phase = vec[0] / abs(vec[0]) if abs(vec[0]) > 1e-15 else 1.0
    e0 = np.zeros(n, dtype=np.complex128)
    e0[0] = 1.0
    w = e0 - vec / phase
    wn = np.linalg.norm(w)
    if wn < 1e-15:
        h = np.eye(n, dtype=np.complex128)
    else:
        w = w / wn
        h = np.eye(n, dtype=np.complex128) - 2.0 * np.outer(w, w.conj())
    return h * phase
