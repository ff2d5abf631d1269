"""Fourier-basis adder and the chained trace circuit.

The accumulator holds |Phi(b)> = QFT|b>. Adding a classical integer ``a``
applies, for every set bit ``2**i`` of ``a`` and every Fourier qubit of output
weight ``2**p`` with ``i + p < width``, a phase ``exp(2 pi i 2**(i+p) / 2**width)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdderOverflowError
from .statevector import QubitRegister, apply_qft, phase_gate

ACC = "acc"


@dataclass(frozen=True)
class BinaryEncodedDiagonal:
    """Non-negative integer diagonal with per-element width and accumulator width."""

    values: tuple
    width: int
    acc_width: int

    def __post_init__(self):
        if not self.values:
            raise ValueError("diagonal must have at least one element")
        for v in self.values:
            if v < 0 or v >= (1 << self.width):
                raise AdderOverflowError(f"value {v} not encodable in {self.width} bits")
        if self.acc_width < self.min_acc_width(len(self.values), self.width):
            raise AdderOverflowError(
                f"accumulator width {self.acc_width} can overflow for {len(self.values)} "
                f"elements of {self.width} bits")

    @staticmethod
    def min_acc_width(count: int, width: int) -> int:
        return width + math.ceil(math.log2(count)) if count > 1 else width

    @classmethod
    def from_values(cls, values, width: int | None = None, acc_width: int | None = None):
        vals = tuple(int(v) for v in values)
        if any(v < 0 for v in vals):
            raise AdderOverflowError("diagonal entries must be non-negative integers")
        if width is None:
            width = max(1, max(vals).bit_length())
        if acc_width is None:
            acc_width = cls.min_acc_width(len(vals), width)
        return cls(vals, int(width), int(acc_width))

    @property
    def count(self) -> int:
        return len(self.values)

    def bits(self, index: int) -> tuple:
        """Big-endian bit expansion of one element."""
        v = self.values[index]
        return tuple((v >> (self.width - 1 - i)) & 1 for i in range(self.width))


def phi_encode(a: int, width: int) -> QubitRegister:
    """QFT|a> on a fresh ``width``-qubit accumulator."""
    if not 0 <= a < (1 << width):
        raise AdderOverflowError(f"{a} does not fit in {width} qubits")
    reg = QubitRegister.basis([(ACC, width)], {ACC: a})
    return apply_qft(reg, ACC)


def fourier_value(reg: QubitRegister, sub: str = ACC) -> int:
    """Peek the integer held in Fourier form by ``sub`` (simulator-side, no gates).

    The sub-register must be the only one or the state must be a product with
    the rest; the most probable value is returned.
    """
    s = reg.sub(sub)
    t = reg.amplitudes.reshape(tuple(1 << x.width for x in reg.layout))
    axis = reg.layout.index(s)
    t = np.moveaxis(t, axis, 0).reshape(1 << s.width, -1)
    # inverse DFT matching QFT^-1
    coeff = np.fft.fft(t, axis=0) / math.sqrt(1 << s.width)
    return int(np.argmax(np.sum(np.abs(coeff) ** 2, axis=1)))


def adder_sigma(a: int, phi_b: QubitRegister, sub: str = ACC) -> QubitRegister:
    """|Phi(b)> -> |Phi(a + b)> by classically controlled phase rotations (in place)."""
    s = phi_b.sub(sub)
    w = s.width
    if a < 0:
        raise AdderOverflowError("adder operand must be non-negative")
    b = fourier_value(phi_b, sub)
    if a + b >= (1 << w):
        raise AdderOverflowError(f"{a} + {b} overflows a {w}-qubit accumulator")
    K = 1 << w
    for i in range(a.bit_length()):
        if not (a >> i) & 1:
            continue
        for p in range(w - i):
            # qubit at position w-1-p carries output weight 2**p
            theta = 2 * math.pi * (1 << (i + p)) / K
            phi_b.apply(phase_gate(theta), [s.offset + w - 1 - p], family="controlled_phase")
    return phi_b


def trace_circuit(diag: BinaryEncodedDiagonal) -> QubitRegister:
    """Encode a_11, chain N-1 adders, apply QFT^-1; returns the final register."""
    reg = phi_encode(diag.values[0], diag.acc_width)
    for v in diag.values[1:]:
        adder_sigma(v, reg)
    return apply_qft(reg, ACC, inverse=True)


def trace_quantum(diag: BinaryEncodedDiagonal, *, tol: float = 1e-9) -> int:
    """Trace read off the computational basis state left by :func:`trace_circuit`."""
    reg = trace_circuit(diag)
    k = int(np.argmax(np.abs(reg.amplitudes)))
    if abs(reg.amplitudes[k]) < 1.0 - tol:
        raise AdderOverflowError(f"trace register is not a basis state (|amp|={abs(reg.amplitudes[k]):.6f})")
    return k


def adder_gate_count(a: int, width: int) -> int:
    """Phase gates used by :func:`adder_sigma` for operand ``a``."""
    return sum(width - i for i in range(min(a.bit_length(), width)) if (a >> i) & 1)
