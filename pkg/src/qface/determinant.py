"""Phase-estimation determinant circuit.

One run per eigenvector |u_j>: prepare |u_j>, QPE with U = exp(2 pi i A / 2**n),
rotate an ancilla by the phase-register value, undo the QPE, and un-prepare the
system. Each run leaves ``sqrt(1 - lt_j**2)|0> + lt_j|1>`` on its ancilla
(``lt_j = lambda_j / 2**n``). The N ancillas are tensored into a product
register whose |1...1> amplitude is prod_j lt_j, and ``(2**n)**N`` times that
amplitude is det(A).

Two rotation backends exist:

``idealized``
    a phase-register-multiplexed rotation that realizes the map
    |0> -> sqrt(1 - lt**2)|0> + lt|1> exactly (default).
``literal``
    the cascade of controlled exp(i sigma_y / 2**l), one per phase bit. It
    composes to exp(i sigma_y lt)|0> = cos(lt)|0> - sin(lt)|1>, so lt is
    recovered per run as arcsin(|amplitude|). The two agree only to first
    order in lt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, SpectrumRangeError
from .linalg import EigenDecomposition, MatrixLike, as_array, det_classical, eig_hermitian, is_hermitian
from .statevector import (
    GateLog,
    QubitRegister,
    apply_controlled_unitary_power,
    apply_controlled_y_rotation,
    apply_hadamard_block,
    apply_qft,
    prepare_state,
    read_amplitude,
    unitary_from_hermitian,
)

PHASE, SYSTEM, ANCILLA, PRODUCT = "phase", "system", "ancilla", "product"
ROTATIONS = ("idealized", "literal")


def system_width(dim: int) -> int:
    return max(1, math.ceil(math.log2(dim)))


def padded(a: np.ndarray, width: int) -> np.ndarray:
    """Embed ``a`` in the top-left block of a ``2**width`` square zero matrix."""
    size = 1 << width
    out = np.zeros((size, size), dtype=np.complex128)
    out[: a.shape[0], : a.shape[1]] = a
    return out


def qpe_unitary(a: MatrixLike, n: int) -> np.ndarray:
    """U = exp(2 pi i A / 2**n), padded to a power-of-two dimension."""
    arr = as_array(a)
    return unitary_from_hermitian(padded(arr, system_width(arr.shape[0])), 2 * math.pi / (1 << n))


def qpe_forward(reg: QubitRegister, u, n: int) -> QubitRegister:
    """H on the phase register, controlled U**(2**(n-l)) from phase qubit l, then QFT^-1."""
    if reg.sub(PHASE).width != n:
        raise DimensionMismatchError(f"phase register has {reg.sub(PHASE).width} qubits, expected {n}")
    apply_hadamard_block(reg, PHASE)
    for l in range(1, n + 1):
        apply_controlled_unitary_power(reg, reg.qubit(PHASE, l - 1), SYSTEM, u, 1 << (n - l))
    return apply_qft(reg, PHASE, inverse=True)


def qpe_inverse(reg: QubitRegister, u, n: int) -> QubitRegister:
    """QFT, controlled (U^dagger)**(2**(n-l)), then H: the exact inverse of :func:`qpe_forward`."""
    apply_qft(reg, PHASE)
    for l in range(n, 0, -1):
        apply_controlled_unitary_power(reg, reg.qubit(PHASE, l - 1), SYSTEM, u, -(1 << (n - l)))
    return apply_hadamard_block(reg, PHASE)


def value_rotation(amplitude: float) -> np.ndarray:
    """Real rotation taking |0> to sqrt(1 - x**2)|0> + x|1>."""
    c = math.sqrt(max(0.0, 1.0 - amplitude * amplitude))
    return np.array([[c, -amplitude], [amplitude, c]], dtype=np.complex128)


def multiplexed_rotation(reg: QubitRegister, amplitude_of) -> QubitRegister:
    """For every phase value k, rotate the ancilla by ``amplitude_of(k)`` (None skips k)."""
    phase = reg.sub(PHASE)
    target = reg.qubit(ANCILLA)
    for k in range(1 << phase.width):
        amp = amplitude_of(k)
        if amp is None or amp == 0.0:
            continue
        bits = [(k >> (phase.width - 1 - i)) & 1 for i in range(phase.width)]
        reg.apply(value_rotation(amp), [target], phase.qubits, bits, family="rotation")
    return reg


def rotation_cascade(reg: QubitRegister, rotation: str = "idealized") -> QubitRegister:
    """Write lt = (phase value) / 2**n into the ancilla."""
    phase = reg.sub(PHASE)
    n = phase.width
    if rotation == "idealized":
        return multiplexed_rotation(reg, lambda k: k / (1 << n))
    if rotation == "literal":
        for l in range(1, n + 1):
            apply_controlled_y_rotation(reg, reg.qubit(PHASE, l - 1), reg.qubit(ANCILLA), l)
        return reg
    raise ValueError(f"rotation must be one of {ROTATIONS}, got {rotation!r}")


@dataclass
class DeterminantRun:
    matrix: np.ndarray = field(repr=False)
    precision: int
    eigen: EigenDecomposition = field(repr=False)
    rotation: str
    lambda_tilde: np.ndarray
    ancilla_states: list = field(repr=False)
    product_register: QubitRegister = field(repr=False)
    product_amplitude: complex
    determinant: float
    phase_residual: float
    log: GateLog = field(repr=False)


def check_spectrum(eigenvalues, n: int) -> None:
    top = 1 << n
    lo, hi = float(np.min(eigenvalues)), float(np.max(eigenvalues))
    if lo <= 0.0:
        raise SpectrumRangeError(f"eigenvalues must be positive (min {lo:.6g}); shifting would change det")
    if hi >= top:
        raise SpectrumRangeError(f"eigenvalue {hi:.6g} does not fit below 2**{n} = {top}; rescale A first")


def condition_spectrum(a: MatrixLike, n: int):
    """Return ``(s * A, s)`` with the spectrum inside (0, 2**n).

    Integer spectra that already fit are left alone (s = 1); otherwise the
    largest eigenvalue is mapped onto the top phase bin 2**n - 1.
    """
    arr = as_array(a)
    vals = eig_hermitian(arr).eigenvalues
    if np.min(vals) <= 0:
        raise SpectrumRangeError("matrix is not positive definite")
    fits = np.max(vals) < (1 << n)
    if fits and np.all(np.abs(vals - np.round(vals)) < 1e-9):
        return np.array(arr, dtype=np.complex128), 1.0
    s = ((1 << n) - 1) / float(np.max(vals))
    return s * np.asarray(arr, dtype=np.complex128), s


def _single_eigenvector_run(u, vec, n, s_width, rotation):
    reg = QubitRegister([(PHASE, n), (SYSTEM, s_width), (ANCILLA, 1)])
    prepare_state(reg, SYSTEM, vec)
    qpe_forward(reg, u, n)
    rotation_cascade(reg, rotation)
    qpe_inverse(reg, u, n)
    prepare_state(reg, SYSTEM, vec, inverse=True)
    c0 = read_amplitude(reg, reg.index_of({}))
    c1 = read_amplitude(reg, reg.index_of({ANCILLA: 1}))
    residual = 1.0 - float(reg.probabilities(PHASE)[0])
    return reg, c0, c1, residual


def run_determinant(a: MatrixLike, n: int, *, rotation: str = "idealized") -> DeterminantRun:
    """Full circuit, one run per oracle eigenvector, with every intermediate kept."""
    if rotation not in ROTATIONS:
        raise ValueError(f"rotation must be one of {ROTATIONS}, got {rotation!r}")
    arr = np.asarray(as_array(a), dtype=np.complex128)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError("determinant needs a square matrix")
    if not is_hermitian(arr):
        raise NotHermitianError("the determinant circuit needs a hermitian matrix")
    eig = eig_hermitian(arr)
    check_spectrum(eig.eigenvalues, n)
    N = arr.shape[0]
    width = system_width(N)
    u = qpe_unitary(arr, n)

    log = GateLog()
    pairs, lt, residual = [], [], 0.0
    for j in range(N):
        reg, c0, c1, res = _single_eigenvector_run(u, eig.eigenvectors[:, j], n, width, rotation)
        log = log.merge(reg.log)
        pairs.append(np.array([c0, c1]))
        residual = max(residual, res)
        if rotation == "idealized":
            lt.append(c1.real)
        else:
            lt.append(math.asin(min(1.0, abs(c1))))

    product = QubitRegister([(PRODUCT, N)], reduce(np.kron, pairs), debug=False)
    amp = read_amplitude(product, product.dim - 1)
    if rotation == "idealized":
        det = (2.0 ** n) ** N * amp.real
    else:
        det = (2.0 ** n) ** N * float(np.prod(lt))
    return DeterminantRun(arr, n, eig, rotation, np.array(lt), pairs, product, amp, det, residual, log)


def determinant_quantum(a: MatrixLike, n: int, *, rotation: str = "idealized") -> float:
    """det(A) from the circuit. Requires hermitian A with spectrum in (0, 2**n)."""
    return run_determinant(a, n, rotation=rotation).determinant


def determinant_error_bound(a: MatrixLike, n: int) -> float:
    """First-order error of the circuit determinant from phase quantization.

    ``|det| * sum_j q_j / lt_j`` with ``q_j`` the distance of ``lt_j`` to the
    nearest multiple of ``2**-n``. Zero for exactly representable spectra.
    """
    vals = eig_hermitian(a).eigenvalues
    scale = float(1 << n)
    lt = vals / scale
    q = np.abs(vals - np.round(vals)) / scale
    det = abs(det_classical(a))
    return float(det * np.sum(q / lt))
