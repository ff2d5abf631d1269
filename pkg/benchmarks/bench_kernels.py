"""Time the numba and numpy variants of each hot kernel side by side.

    python benchmarks/bench_kernels.py [--repeat 5]

Both variants are called directly, so the QFACE_DISABLE_NUMBA flag does not
matter here. The first numba call (compilation) is excluded.
"""

import argparse
import time

import numpy as np

from qface import kernels


def best_of(fn, repeat):
    fn()  # warm-up / JIT compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    nq = 16
    state = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
    state /= np.linalg.norm(state)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))

    def gate(variant):
        s = state.copy()
        return lambda: variant(s, q, [3, 9], [0, 14], [1, 0], nq)

    a = rng.normal(size=(48, 48)) + 1j * rng.normal(size=(48, 48))
    herm = a + a.conj().T

    pairs = 2_000_000
    obj = rng.integers(0, 256, pairs)
    cam = np.where(rng.random(pairs) < 0.95, obj, -1)
    trans = rng.random(256)
    u = rng.random(pairs)

    yield "apply_matrix (16 qubits, 2-qubit gate, 2 controls)", gate(kernels.apply_matrix_numba), gate(kernels.apply_matrix_numpy)
    yield "jacobi_eigh (48x48 hermitian)", lambda: kernels.jacobi_eigh_numba(herm), lambda: kernels.jacobi_eigh_numpy(herm)
    yield "coincidences (2M pairs, 256 pixels)", (lambda: kernels.coincidences_numba(obj, cam, trans, u)), \
        (lambda: kernels.coincidences_numpy(obj, cam, trans, u))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<52}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fast, slow in cases(rng):
        tn = best_of(fast, args.repeat)
        tp = best_of(slow, args.repeat)
        print(f"{name:<52}{tn * 1e3:>12.2f}{tp * 1e3:>12.2f}{tp / tn:>10.1f}")


if __name__ == "__main__":
    main()
