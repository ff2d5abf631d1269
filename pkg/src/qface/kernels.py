"""Hot numeric kernels with numba and pure-numpy implementations.

Every public kernel dispatches on :data:`qface._accel.USE_NUMBA`. The ``*_numba``
and ``*_numpy`` variants stay importable so tests and the benchmark can compare
them directly.

Qubit convention: qubit 0 is the most significant bit of the flat amplitude
index (big-endian), so a register of ``m`` qubits reshapes to ``(2,) * m`` with
axis ``q`` holding qubit ``q``.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, jit

# ---------------------------------------------------------------------------
# Controlled dense gate on a statevector
# ---------------------------------------------------------------------------


def _target_offsets(targets, nqubits):
    w = len(targets)
    offsets = np.zeros(1 << w, dtype=np.int64)
    for k in range(1 << w):
        off = 0
        for j, t in enumerate(targets):
            if (k >> (w - 1 - j)) & 1:
                off |= 1 << (nqubits - 1 - t)
        offsets[k] = off
    return offsets


def _masks(qubits, values, nqubits):
    mask = 0
    want = 0
    for q, v in zip(qubits, values):
        bit = 1 << (nqubits - 1 - q)
        mask |= bit
        if v:
            want |= bit
    return mask, want


@jit
def _apply_matrix_loop(state, mat, offsets, tmask, cmask, cval):
    dim = offsets.shape[0]
    buf = np.empty(dim, dtype=np.complex128)
    for i in range(state.shape[0]):
        if (i & tmask) != 0 or (i & cmask) != cval:
            continue
        for k in range(dim):
            buf[k] = state[i + offsets[k]]
        for r in range(dim):
            acc = 0j
            for c in range(dim):
                acc += mat[r, c] * buf[c]
            state[i + offsets[r]] = acc


def apply_matrix_numba(state, mat, targets, controls=(), control_values=None, nqubits=None):
    nqubits = int(round(math.log2(state.shape[0]))) if nqubits is None else nqubits
    if control_values is None:
        control_values = (1,) * len(controls)
    offsets = _target_offsets(targets, nqubits)
    tmask, _ = _masks(targets, (0,) * len(targets), nqubits)
    cmask, cval = _masks(controls, control_values, nqubits)
    _apply_matrix_loop(state, np.ascontiguousarray(mat, dtype=np.complex128), offsets, tmask, cmask, cval)
    return state


def apply_matrix_numpy(state, mat, targets, controls=(), control_values=None, nqubits=None):
    nqubits = int(round(math.log2(state.shape[0]))) if nqubits is None else nqubits
    if control_values is None:
        control_values = (1,) * len(controls)
    psi = state.reshape((2,) * nqubits)
    index = [slice(None)] * nqubits
    for c, v in zip(controls, control_values):
        index[c] = int(v)
    sub = psi[tuple(index)]
    free = [q for q in range(nqubits) if q not in controls]
    tpos = [free.index(t) for t in targets]
    moved = np.moveaxis(sub, tpos, range(len(targets)))
    shape = moved.shape
    block = moved.reshape(1 << len(targets), -1)
    moved[...] = (mat @ block).reshape(shape)
    return state


def apply_matrix(state, mat, targets, controls=(), control_values=None, nqubits=None):
    """Apply ``mat`` in place to ``targets`` where every control matches its value.

    ``state`` must be a contiguous complex128 vector of length ``2**nqubits``.
    Targets are ordered most-significant first relative to ``mat``.
    """
    if USE_NUMBA:
        return apply_matrix_numba(state, mat, targets, controls, control_values, nqubits)
    return apply_matrix_numpy(state, mat, targets, controls, control_values, nqubits)


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for hermitian matrices
# ---------------------------------------------------------------------------


def _jacobi_sweeps(a, v, tol, max_sweeps):
    # Shared body: runs as plain numpy or compiled by numba.
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag == 0.0:
                    continue
                phase = b / mag
                alpha = a[p, p].real
                gamma = a[q, q].real
                theta = 0.5 * math.atan2(2.0 * mag, alpha - gamma)
                c = math.cos(theta)
                s = math.sin(theta)
                g00 = c + 0j
                g01 = -s + 0j
                g10 = s * np.conj(phase)
                g11 = c * np.conj(phase)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp * g00 + colq * g10
                a[:, q] = colp * g01 + colq * g11
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = np.conj(g00) * rowp + np.conj(g10) * rowq
                a[q, :] = np.conj(g01) * rowp + np.conj(g11) * rowq
                a[p, q] = 0j
                a[q, p] = 0j
                a[p, p] = a[p, p].real + 0j
                a[q, q] = a[q, q].real + 0j
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * g00 + vq * g10
                v[:, q] = vp * g01 + vq * g11
    return max_sweeps


_jacobi_sweeps_jit = jit(_jacobi_sweeps)


def _jacobi(a, tol, max_sweeps, compiled):
    work = np.array(a, dtype=np.complex128, copy=True, order="C")
    v = np.eye(work.shape[0], dtype=np.complex128)
    scale = max(np.linalg.norm(work), 1.0)
    fn = _jacobi_sweeps_jit if compiled else _jacobi_sweeps
    sweeps = fn(work, v, tol * scale, max_sweeps)
    if sweeps >= max_sweeps:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.real(np.diag(work)).copy(), v


def jacobi_eigh_numba(a, tol=1e-12, max_sweeps=100):
    return _jacobi(a, tol, max_sweeps, compiled=True)


def jacobi_eigh_numpy(a, tol=1e-12, max_sweeps=100):
    return _jacobi(a, tol, max_sweeps, compiled=False)


def jacobi_eigh(a, tol=1e-12, max_sweeps=100):
    """Unsorted eigenpairs ``(w, v)`` of a hermitian matrix; columns of ``v`` are eigenvectors."""
    return _jacobi(a, tol, max_sweeps, compiled=USE_NUMBA)


# ---------------------------------------------------------------------------
# Ghost-imaging coincidence accumulation
# ---------------------------------------------------------------------------


@jit
def _coincidence_loop(obj_idx, cam_idx, transmission, u, counts, illum):
    for k in range(obj_idx.shape[0]):
        o = obj_idx[k]
        illum[o] += 1
        c = cam_idx[k]
        if c >= 0 and u[k] < transmission[o]:
            counts[c] += 1


def coincidences_numba(obj_idx, cam_idx, transmission, u):
    npix = transmission.shape[0]
    counts = np.zeros(npix, dtype=np.int64)
    illum = np.zeros(npix, dtype=np.int64)
    _coincidence_loop(obj_idx, cam_idx, transmission, u, counts, illum)
    return counts, illum


def coincidences_numpy(obj_idx, cam_idx, transmission, u):
    npix = transmission.shape[0]
    illum = np.bincount(obj_idx, minlength=npix).astype(np.int64)
    hit = (cam_idx >= 0) & (u < transmission[obj_idx])
    counts = np.bincount(cam_idx[hit], minlength=npix).astype(np.int64)
    return counts, illum


def coincidences(obj_idx, cam_idx, transmission, u):
    """Per-pixel coincidence counts and object-arm illumination.

    Pair ``k`` illuminates object pixel ``obj_idx[k]``; its partner lands on
    camera pixel ``cam_idx[k]`` (``-1`` when off the raster) and is counted when
    ``u[k] < transmission[obj_idx[k]]``.
    """
    if USE_NUMBA:
        return coincidences_numba(obj_idx, cam_idx, transmission, u)
    return coincidences_numpy(obj_idx, cam_idx, transmission, u)
