"""Log-determinant divergence D(X, Y) = Tr(X Y^-1) - ln det(X Y^-1) - N.

Two backends:

``classical``
    Gauss-Jordan inverse, summed trace, LU log-determinant.
``quantum``
    A = X Y^-1 assembled column by column with HHL. Tr(A) comes from the
    Fourier adder on a fixed-point diagonal, with a uniform offset so every
    entry is non-negative. ln det(A) = ln det X - ln det Y, each determinant
    from the phase-estimation circuit after uniform spectral scaling. A itself
    is not hermitian, so the circuit cannot exponentiate it directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .determinant import condition_spectrum, determinant_error_bound, run_determinant
from .errors import DeterminantUnderflowError, DimensionMismatchError, EmptyInputError
from .hhl import hhl_run, spectral_scale
from .linalg import as_array, det_classical, eig_hermitian, inverse, slogdet_classical, trace_classical
from .statevector import GateLog
from .trace_circuit import BinaryEncodedDiagonal, trace_circuit

BACKENDS = ("classical", "quantum")
DEFAULT_FRAC_BITS = 8
EPS_FRACTION = 0.05


@dataclass(frozen=True)
class FaceMatrix:
    """Sparsified, symmetrized, regularized square form of a face."""

    matrix: np.ndarray = field(repr=False)
    tau: float
    eps: float
    shift: float = 0.0  # extra diagonal lift needed to make the symmetric part positive

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def default_eps(matrices) -> float:
    """0.05 x mean diagonal over the given (symmetrized) matrices."""
    diag = np.concatenate([np.real(np.diag(np.asarray(m))) for m in matrices])
    mean = float(np.mean(diag)) if diag.size else 0.0
    return EPS_FRACTION * mean if mean > 0 else EPS_FRACTION


def square_form(face) -> np.ndarray:
    vec = np.asarray(face).reshape(-1)
    side = math.isqrt(vec.shape[0])
    if side * side != vec.shape[0]:
        raise DimensionMismatchError(f"face length {vec.shape[0]} is not a perfect square")
    return vec.reshape(side, side)


def sparsify(m: np.ndarray, tau: float) -> np.ndarray:
    """Zero every entry with |entry| <= tau * max|entry|."""
    out = np.array(m, copy=True)
    peak = np.max(np.abs(out)) if out.size else 0.0
    out[np.abs(out) <= tau * peak] = 0
    return out


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.conj(m).T)


def prepare_face_matrix(face, tau: float = 0.0, eps: float | None = None) -> FaceMatrix:
    """Row-major reshape, threshold at tau * max|entry|, symmetrize, add eps I.

    When the symmetric part is indefinite the diagonal is lifted further by
    -lambda_min, so the result always has smallest eigenvalue >= eps.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    m = square_form(face)
    if not np.iscomplexobj(m):
        m = m.astype(np.float64)
    s = symmetrize(sparsify(m, tau))
    if eps is None:
        eps = default_eps([s])
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo = float(np.min(eig_hermitian(s).eigenvalues)) if np.any(s) else 0.0
    scale = max(1.0, float(np.max(np.abs(s))) if s.size else 1.0)
    shift = -lo if lo < -1e-12 * scale else 0.0
    out = s + (eps + shift) * np.eye(s.shape[0])
    return FaceMatrix(out, float(tau), float(eps), shift)


def _matrix(x) -> np.ndarray:
    return x.matrix if isinstance(x, FaceMatrix) else np.asarray(as_array(x))


@dataclass
class DivergenceResult:
    value: float
    backend: str
    trace_term: float
    logdet_term: float
    dim: int
    gate_counts: dict | None = None
    error_bound: float | None = None


def _classical(xm, ym) -> DivergenceResult:
    a = xm @ inverse(ym)
    tr = float(np.real(trace_classical(a)))
    sign, logabs = slogdet_classical(a)
    if not np.isfinite(logabs) or np.real(sign) <= 0:
        raise DeterminantUnderflowError("det(X Y^-1) is not positive and finite")
    n = xm.shape[0]
    return DivergenceResult(tr - logabs - n, "classical", tr, logabs, n)


def fixed_point_diagonal(values, frac_bits: int):
    """Integers round((d + offset) * 2**f) with offset making every entry >= 0."""
    d = np.real(np.asarray(values, dtype=np.complex128))
    offset = max(0.0, -float(np.min(d)))
    ints = np.rint((d + offset) * (1 << frac_bits)).astype(np.int64)
    return [int(v) for v in ints], offset


def quantum_trace(a: np.ndarray, frac_bits: int = DEFAULT_FRAC_BITS):
    """Trace through the adder circuit. Returns ``(trace, register)``."""
    ints, offset = fixed_point_diagonal(np.diag(a), frac_bits)
    diag = BinaryEncodedDiagonal.from_values(ints)
    reg = trace_circuit(diag)
    k = int(np.argmax(np.abs(reg.amplitudes)))
    return k / (1 << frac_bits) - a.shape[0] * offset, reg


def quantum_logdet(m: np.ndarray, n: int):
    """ln det(M) via the determinant circuit on s*M. Returns ``(logdet, run)``."""
    scaled, s = condition_spectrum(m, n)
    run = run_determinant(scaled, n)
    if run.determinant <= 0 or not np.isfinite(run.determinant):
        raise DeterminantUnderflowError(f"circuit determinant {run.determinant!r} is not positive")
    return math.log(run.determinant) - m.shape[0] * math.log(s), run


def quantum_ratio(xm, ym, n: int):
    """X Y^-1 with Y^-1 from HHL columns; also returns the merged gate log."""
    d = ym.shape[0]
    s = spectral_scale(ym, n)
    log = GateLog()
    cols = []
    for k in range(d):
        e = np.zeros(d, dtype=np.complex128)
        e[k] = 1.0
        run = hhl_run(s * ym, e, n, kappa_cap=None)
        log = log.merge(run.log)
        cols.append(run.estimate * s)
    return xm @ np.column_stack(cols), log


def _quantum(xm, ym, n, frac_bits) -> DivergenceResult:
    dim = xm.shape[0]
    a, log = quantum_ratio(xm, ym, n)
    tr, treg = quantum_trace(a, frac_bits)
    log = log.merge(treg.log)
    ldx, rx = quantum_logdet(xm, n)
    ldy, ry = quantum_logdet(ym, n)
    log = log.merge(rx.log).merge(ry.log)
    logdet = ldx - ldy
    bound = divergence_error_bound(xm, ym, n, frac_bits)
    return DivergenceResult(tr - logdet - dim, "quantum", tr, logdet, dim, log.as_dict(), bound)


def divergence_error_bound(x, y, n: int, frac_bits: int = DEFAULT_FRAC_BITS, *, safety: float = 3.0) -> float:
    """Declared tolerance between the quantum and classical backends.

    Sum of the fixed-point rounding of the trace (N 2**-(f+1)), the
    first-order inverse error from quantizing the scaled spectrum of Y, and
    the relative determinant bounds of s X and s Y, times ``safety``.
    """
    xm, ym = _matrix(x), _matrix(y)
    dim = xm.shape[0]
    total = dim * 2.0 ** -(frac_bits + 1)
    sy = spectral_scale(ym, n)
    vy = eig_hermitian(sy * ym).eigenvalues
    rel_inv = float(np.max(np.abs(vy - np.round(vy)) / vy))
    a = xm @ inverse(ym)
    total += float(np.sum(np.abs(np.diag(a)))) * rel_inv
    for m in (xm, ym):
        scaled, _ = condition_spectrum(m, n)
        total += determinant_error_bound(scaled, n) / abs(det_classical(scaled))
    return safety * total


def logdet_divergence(x, y, backend: str = "classical", *, n: int = 4,
                      frac_bits: int = DEFAULT_FRAC_BITS) -> DivergenceResult:
    """D(X, Y) for SPD X, Y of equal dimension (natural log)."""
    xm, ym = _matrix(x), _matrix(y)
    if xm.shape != ym.shape or xm.shape[0] != xm.shape[1]:
        raise DimensionMismatchError(f"need equal square matrices, got {xm.shape} and {ym.shape}")
    if backend == "classical":
        return _classical(xm, ym)
    if backend == "quantum":
        return _quantum(np.asarray(xm, dtype=np.complex128), np.asarray(ym, dtype=np.complex128), n, frac_bits)
    raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")


def frobenius_distance(x, y) -> float:
    """Baseline for comparison plots only."""
    return float(np.linalg.norm(_matrix(x) - _matrix(y)))


@dataclass
class FaceMatch:
    divergences: np.ndarray
    ranking: list
    best: int
    margin: float
    backend: str
    gate_counts: dict | None = None


def match_face(query, database, backend: str = "classical", *, n: int = 4,
               frac_bits: int = DEFAULT_FRAC_BITS) -> FaceMatch:
    """Divergence of the query to every database entry; smallest wins, ties by index."""
    if len(database) == 0:
        raise EmptyInputError("database is empty")
    results = [logdet_divergence(query, y, backend, n=n, frac_bits=frac_bits) for y in database]
    values = np.array([r.value for r in results])
    ranking = sorted(range(len(values)), key=lambda k: (values[k], k))
    best = ranking[0]
    margin = float(values[ranking[1]] - values[best]) if len(ranking) > 1 else math.inf
    counts = None
    if backend == "quantum":
        counts = {}
        for r in results:
            for key, v in r.gate_counts.items():
                counts[key] = counts.get(key, 0) + v
    return FaceMatch(values, ranking, best, margin, backend, counts)
