"""Statevector simulator over named sub-registers.

Gates mutate the register in place and return it, so calls chain. Each gate is
tallied in the register's :class:`GateLog`. Set ``QFACE_DEBUG=1`` (or pass
``debug=True``) to assert norm preservation after every gate.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, NonUnitaryError, NotHermitianError, UnknownRegisterError
from .linalg import MatrixLike, as_array, eig_hermitian, is_hermitian, unitary_with_first_column

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
MAX_QUBITS = 20

GATE_FAMILIES = ("hadamard", "controlled_phase", "controlled_unitary", "rotation", "swap", "state_prep")

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class SubRegister:
    name: str
    offset: int
    width: int

    @property
    def qubits(self) -> list[int]:
        return list(range(self.offset, self.offset + self.width))


@dataclass
class GateLog:
    """Gate tallies per family plus a greedy layered depth estimate."""

    counts: Counter = field(default_factory=Counter)
    depth: int = 0
    _frontier: dict = field(default_factory=dict, repr=False)

    def record(self, family: str, qubits: Iterable[int], times: int = 1) -> None:
        if family not in GATE_FAMILIES:
            raise ValueError(f"unknown gate family {family!r}")
        qubits = list(qubits)
        for _ in range(times):
            layer = 1 + max((self._frontier.get(q, 0) for q in qubits), default=0)
            for q in qubits:
                self._frontier[q] = layer
            self.depth = max(self.depth, layer)
        self.counts[family] += times

    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> dict:
        out = {fam: int(self.counts.get(fam, 0)) for fam in GATE_FAMILIES}
        out["total"] = self.total()
        out["depth"] = self.depth
        return out

    def merge(self, other: "GateLog") -> "GateLog":
        """Sequential composition: counts add, depths add (upper bound)."""
        merged = GateLog(self.counts + other.counts, self.depth + other.depth)
        return merged


def _debug_default() -> bool:
    return os.environ.get("QFACE_DEBUG", "").strip().lower() not in ("", "0", "false", "no")


class QubitRegister:
    """A ``2**m`` amplitude statevector partitioned into named sub-registers.

    Qubit 0 is the most significant bit of the flat index; within a
    sub-register the lowest-offset qubit is the most significant bit of its
    value.
    """

    def __init__(self, layout: Sequence[tuple[str, int]], amplitudes=None, *, debug: bool | None = None,
                 log: GateLog | None = None):
        subs, offset = [], 0
        names = set()
        for name, width in layout:
            if width < 1:
                raise ValueError(f"sub-register {name!r} needs width >= 1")
            if name in names:
                raise ValueError(f"duplicate sub-register {name!r}")
            names.add(name)
            subs.append(SubRegister(name, offset, int(width)))
            offset += int(width)
        if offset > MAX_QUBITS:
            raise ValueError(f"{offset} qubits exceeds the simulator cap of {MAX_QUBITS}")
        self.layout = tuple(subs)
        self.nqubits = offset
        if amplitudes is None:
            amps = np.zeros(1 << offset, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.array(amplitudes, dtype=np.complex128, copy=True)
            if amps.shape != (1 << offset,):
                raise DimensionMismatchError(f"expected {1 << offset} amplitudes, got {amps.shape}")
        self.amplitudes = amps
        self.debug = _debug_default() if debug is None else debug
        self.log = log if log is not None else GateLog()
        self._by_name = {s.name: s for s in subs}

    # -- construction helpers ------------------------------------------------

    @classmethod
    def basis(cls, layout, values: dict | None = None, **kwargs) -> "QubitRegister":
        """Computational basis state with the given per-sub-register integer values."""
        reg = cls(layout, **kwargs)
        reg.amplitudes[:] = 0
        reg.amplitudes[reg.index_of(values or {})] = 1.0
        return reg

    def copy(self) -> "QubitRegister":
        log = GateLog(Counter(self.log.counts), self.log.depth, dict(self.log._frontier))
        return QubitRegister([(s.name, s.width) for s in self.layout], self.amplitudes,
                             debug=self.debug, log=log)

    # -- addressing ----------------------------------------------------------

    def sub(self, name: str) -> SubRegister:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownRegisterError(f"no sub-register named {name!r}") from None

    def qubit(self, name: str, position: int = 0) -> int:
        s = self.sub(name)
        if not 0 <= position < s.width:
            raise IndexError(f"position {position} outside sub-register {name!r} of width {s.width}")
        return s.offset + position

    def index_of(self, values: dict) -> int:
        index = 0
        for s in self.layout:
            v = int(values.get(s.name, 0))
            if not 0 <= v < (1 << s.width):
                raise ValueError(f"value {v} does not fit sub-register {s.name!r} ({s.width} qubits)")
            index |= v << (self.nqubits - s.offset - s.width)
        for name in values:
            self.sub(name)
        return index

    @property
    def dim(self) -> int:
        return 1 << self.nqubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per sub-register (a view)."""
        return self.amplitudes.reshape(tuple(1 << s.width for s in self.layout))

    def probabilities(self, name: str) -> np.ndarray:
        """Marginal outcome distribution of one sub-register."""
        t = np.abs(self.tensor()) ** 2
        axis = self.layout.index(self.sub(name))
        other = tuple(i for i in range(len(self.layout)) if i != axis)
        return t.sum(axis=other)

    # -- low-level gate application -----------------------------------------

    def apply(self, mat, targets, controls=(), control_values=None, *, family: str, count: int = 1):
        targets = list(targets)
        controls = list(controls)
        if set(targets) & set(controls):
            raise ValueError("control and target qubits must differ")
        kernels.apply_matrix(self.amplitudes, np.asarray(mat, dtype=np.complex128), targets, controls,
                             control_values, self.nqubits)
        self.log.record(family, targets + controls, count)
        if self.debug:
            self.check_norm()
        return self

    def relabel(self, perm: Sequence[int]) -> "QubitRegister":
        """Permute qubit wires (new qubit ``i`` is old qubit ``perm[i]``); not a gate."""
        t = self.amplitudes.reshape((2,) * self.nqubits)
        self.amplitudes = np.ascontiguousarray(np.transpose(t, perm)).reshape(-1)
        return self

    def check_norm(self, tol: float = NORM_TOL) -> None:
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise AssertionError(f"statevector norm drifted to {n!r}")

    def __repr__(self):
        subs = ", ".join(f"{s.name}[{s.width}]" for s in self.layout)
        return f"QubitRegister({subs})"


# ---------------------------------------------------------------------------
# Gate set
# ---------------------------------------------------------------------------


def apply_hadamard_block(reg: QubitRegister, sub: str) -> QubitRegister:
    for q in reg.sub(sub).qubits:
        reg.apply(HADAMARD, [q], family="hadamard")
    return reg


def phase_gate(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=np.complex128)


def apply_controlled_phase(reg: QubitRegister, control: int, target: int, theta: float) -> QubitRegister:
    return reg.apply(phase_gate(theta), [target], [control], family="controlled_phase")


def _reverse_sub(reg: QubitRegister, s: SubRegister) -> None:
    perm = list(range(reg.nqubits))
    perm[s.offset:s.offset + s.width] = perm[s.offset:s.offset + s.width][::-1]
    reg.relabel(perm)


def apply_qft(reg: QubitRegister, sub: str, inverse: bool = False) -> QubitRegister:
    """|a> -> K^-1/2 sum_k exp(2 pi i a k / K)|k> on ``sub`` (conjugate if ``inverse``).

    Uses ``w`` Hadamards and ``w(w-1)/2`` controlled phases. The output bit
    reversal is a wire relabel and costs no gates.
    """
    s = reg.sub(sub)
    q = s.qubits
    w = s.width
    if not inverse:
        for j in range(w):
            reg.apply(HADAMARD, [q[j]], family="hadamard")
            for k in range(j + 1, w):
                apply_controlled_phase(reg, q[k], q[j], 2 * math.pi / (1 << (k - j + 1)))
        _reverse_sub(reg, s)
    else:
        _reverse_sub(reg, s)
        for j in reversed(range(w)):
            for k in reversed(range(j + 1, w)):
                apply_controlled_phase(reg, q[k], q[j], -2 * math.pi / (1 << (k - j + 1)))
            reg.apply(HADAMARD, [q[j]], family="hadamard")
    return reg


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    if u.shape[0] != u.shape[1]:
        raise DimensionMismatchError(f"unitary must be square, got {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise NonUnitaryError(f"matrix deviates from unitarity by {err:.3e}")


def apply_controlled_unitary_power(reg: QubitRegister, control: int, sub: str, u: MatrixLike,
                                   power: int = 1) -> QubitRegister:
    """Apply ``u**power`` to ``sub`` when ``control`` is |1>.

    The power is formed by repeated squaring, and the result is applied as
    one dense block.
    """
    u = np.asarray(as_array(u), dtype=np.complex128)
    check_unitary(u)
    s = reg.sub(sub)
    if u.shape[0] != 1 << s.width:
        raise DimensionMismatchError(f"unitary of dim {u.shape[0]} on a {s.width}-qubit sub-register")
    if power < 0:
        u, power = u.conj().T, -power
    mat = np.linalg.matrix_power(u, int(power))
    return reg.apply(mat, s.qubits, [control], family="controlled_unitary")


def unitary_from_hermitian(a: MatrixLike, phase_scale: float) -> np.ndarray:
    """exp(i * phase_scale * A) built from the oracle eigendecomposition."""
    if not is_hermitian(a):
        raise NotHermitianError("unitary_from_hermitian needs a hermitian matrix")
    vals, vecs = eig_hermitian(a)
    return (vecs * np.exp(1j * phase_scale * vals)) @ vecs.conj().T


def y_rotation(angle: float) -> np.ndarray:
    """exp(i * angle * sigma_y) = [[cos, sin], [-sin, cos]]."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def apply_controlled_y_rotation(reg: QubitRegister, control: int, target: int, l: int) -> QubitRegister:
    """Controlled exp(i sigma_y / 2**l)."""
    if l < 0:
        raise ValueError("rotation index l must be >= 0")
    if control == target:
        raise ValueError("control and target must differ")
    return reg.apply(y_rotation(2.0 ** -l), [target], [control], family="rotation")


def apply_swap(reg: QubitRegister, q1: int, q2: int) -> QubitRegister:
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)
    return reg.apply(swap, [q1, q2], family="swap")


def prepare_state(reg: QubitRegister, sub: str, vector, *, inverse: bool = False) -> QubitRegister:
    """Unitary taking |0> of ``sub`` to ``vector`` (or back, with ``inverse``).

    ``vector`` shorter than the sub-register dimension is zero-padded.
    """
    s = reg.sub(sub)
    vec = np.zeros(1 << s.width, dtype=np.complex128)
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if v.shape[0] > vec.shape[0]:
        raise DimensionMismatchError(f"vector of length {v.shape[0]} exceeds sub-register {sub!r}")
    vec[: v.shape[0]] = v
    u = unitary_with_first_column(vec)
    if inverse:
        u = u.conj().T
    return reg.apply(u, s.qubits, family="state_prep")


def read_amplitude(reg: QubitRegister, index: int) -> complex:
    """Exact amplitude at a flat basis index; does not disturb the state."""
    if not 0 <= index < reg.dim:
        raise IndexError(f"basis index {index} outside [0, {reg.dim})")
    return complex(reg.amplitudes[index])


def fidelity(a, b) -> float:
    """|<a|b>| for unit vectors; insensitive to global phase."""
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))
