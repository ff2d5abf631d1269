import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qface.errors import AdderOverflowError
from qface.linalg import trace_classical
from qface.statevector import QubitRegister, apply_qft
from qface.trace_circuit import (
    BinaryEncodedDiagonal,
    adder_gate_count,
    adder_sigma,
    phi_encode,
    trace_circuit,
    trace_quantum,
)


def decode(reg):
    apply_qft(reg, "acc", inverse=True)
    k = int(np.argmax(np.abs(reg.amplitudes)))
    return k, abs(reg.amplitudes[k])


class TestPhiEncode:
    def test_zero_uniform(self):
        reg = phi_encode(0, 3)
        np.testing.assert_allclose(reg.amplitudes, np.full(8, 1 / math.sqrt(8)))

    def test_three_width_three(self):
        k = np.arange(8)
        np.testing.assert_allclose(phi_encode(3, 3).amplitudes, np.exp(2j * math.pi * 3 * k / 8) / math.sqrt(8), atol=1e-12)

    @pytest.mark.parametrize("a", range(16))
    def test_inverse_recovers(self, a):
        assert decode(phi_encode(a, 4)) == (a, pytest.approx(1))

    def test_overflow(self):
        with pytest.raises(AdderOverflowError):
            phi_encode(8, 3)


class TestAdder:
    def test_add_zero_unchanged(self):
        reg = phi_encode(5, 4)
        before = reg.amplitudes.copy()
        adder_sigma(0, reg)
        np.testing.assert_allclose(reg.amplitudes, before)

    def test_five_plus_three(self):
        k, amp = decode(adder_sigma(5, phi_encode(3, 4)))
        assert k == 8 and amp == pytest.approx(1)

    def test_exhaustive_width5(self):
        for a in range(16):
            for b in range(16):
                k, amp = decode(adder_sigma(a, phi_encode(b, 5)))
                assert k == a + b and amp >= 1 - 1e-9

    def test_overflow(self):
        with pytest.raises(AdderOverflowError):
            adder_sigma(9, phi_encode(8, 4))

    def test_gate_count_formula(self):
        for a in range(32):
            reg = adder_sigma(a, phi_encode(0, 6))
            assert reg.log.counts["controlled_phase"] - 15 == adder_gate_count(a, 6)

    def test_adder_on_subregister(self):
        reg = QubitRegister.basis([("x", 1), ("acc", 3)], {"acc": 2})
        apply_qft(reg, "acc")
        adder_sigma(3, reg)
        apply_qft(reg, "acc", inverse=True)
        assert abs(reg.amplitudes[reg.index_of({"acc": 5})]) == pytest.approx(1)


class TestDiagonal:
    def test_widths(self):
        d = BinaryEncodedDiagonal.from_values([3, 5])
        assert d.width == 3 and d.acc_width == 4
        assert d.bits(1) == (1, 0, 1)

    def test_rejects(self):
        with pytest.raises(AdderOverflowError):
            BinaryEncodedDiagonal((8,), 3, 3)
        with pytest.raises(AdderOverflowError):
            BinaryEncodedDiagonal((1, 1, 1), 1, 1)
        with pytest.raises(AdderOverflowError):
            BinaryEncodedDiagonal.from_values([-1, 2])


class TestTrace:
    def test_identity(self):
        assert trace_quantum(BinaryEncodedDiagonal.from_values([1, 1, 1, 1], width=1)) == 4

    def test_three_five(self):
        assert trace_quantum(BinaryEncodedDiagonal.from_values([3, 5], width=3)) == 8

    def test_seeded_eight(self, rng):
        vals = rng.integers(0, 32, 8)
        assert trace_quantum(BinaryEncodedDiagonal.from_values(vals)) == int(trace_classical(np.diag(vals)).real)

    @given(st.lists(st.integers(0, 31), min_size=1, max_size=8))
    def test_property(self, vals):
        assert trace_quantum(BinaryEncodedDiagonal.from_values(vals)) == sum(vals)

    def test_counts_grow_with_n(self):
        totals = [trace_circuit(BinaryEncodedDiagonal((7,) * n, 3, 6)).log.total() for n in range(2, 9)]
        assert np.all(np.diff(totals) == totals[1] - totals[0])
