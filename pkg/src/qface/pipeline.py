"""End-to-end recognition: ingest, ghost imaging, eigenfaces, divergence matching, report."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import DEFAULT_IDENTITIES, load_directory, synthetic_faces
from .determinant import run_determinant, system_width
from .divergence import (
    BACKENDS,
    EPS_FRACTION,
    divergence_error_bound,
    logdet_divergence,
    prepare_face_matrix,
    symmetrize,
)
from .errors import ConfigError, EmptyInputError, QubitBudgetError
from .ghost import FaceImage, GhostConfig, synthesize
from .pgm import write_pgm
from .qpca import TrainingSet, build_covariance, expand_face, qpca_eigenfaces, scores, select_principal
from .statevector import MAX_QUBITS, GateLog, QubitRegister, apply_qft
from .trace_circuit import BinaryEncodedDiagonal, trace_circuit

log = logging.getLogger(__name__)

SCHEMA = 1
SEED_ENV = "QFACE_SEED"
QUANTUM_MAX_DIM = 4
MAX_PRECISION = 8
MAX_PIXELS = 4096


@dataclass(frozen=True)
class PipelineConfig:
    images: str | None = None  # database directory of PGMs; None uses the synthetic corpus
    queries: str | None = None  # query directory; None queries every database face
    side: int = 16
    r: int = 4
    tau: float = 0.1
    eps: float | None = None  # None: 0.05 x mean diagonal over the database
    backend: str = "classical"
    n: int = 4
    ghost: bool = True
    frames: int = 300
    pairs_per_frame: int = 16
    jitter: float = 0.5
    dark_rate: float = 0.01
    feature_space: bool = False
    corpus_size: int = DEFAULT_IDENTITIES
    corpus_seed: int = 0
    seed: int = 0
    out: str | None = None
    dump_images: bool = False

    def __post_init__(self):
        if self.side < 1 or self.side & (self.side - 1):
            raise ConfigError(f"side must be a power of two, got {self.side}")
        if self.side * self.side > MAX_PIXELS:
            raise ConfigError(f"side**2 = {self.side ** 2} exceeds {MAX_PIXELS}")
        if not 1 <= self.n <= MAX_PRECISION:
            raise ConfigError(f"n must lie in 1..{MAX_PRECISION}")
        if self.r < 1:
            raise ConfigError("r must be at least 1")
        if self.backend not in BACKENDS + ("both",):
            raise ConfigError(f"backend must be classical, quantum or both, got {self.backend!r}")
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError("tau must lie in [0, 1]")
        if self.eps is not None and self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.frames < 0 or self.pairs_per_frame < 0 or self.jitter < 0:
            raise ConfigError("ghost frames, pairs and jitter must be non-negative")
        if not 0.0 <= self.dark_rate <= 1.0:
            raise ConfigError("dark_rate is a probability")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.corpus_size < 2:
            raise ConfigError("need at least two database faces")

    # -- flat key=value files -------------------------------------------------

    @classmethod
    def from_text(cls, text: str, **overrides) -> "PipelineConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in types:
                raise ConfigError(f"config line {lineno}: unknown or malformed entry {raw.strip()!r}")
            values[key] = _parse_value(types[key], value, key)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def from_file(cls, path, **overrides) -> "PipelineConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, **overrides)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name}={'' if v is None else str(v).lower() if isinstance(v, bool) else v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """SHA-256 over every setting that affects results (output location excluded)."""
        d = self.as_dict()
        d.pop("out")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def ghost_config(self, seed: int) -> GhostConfig:
        return GhostConfig(self.frames, self.pairs_per_frame, None, self.jitter, seed, self.dark_rate)


def _parse_value(kind: str, value: str, key: str):
    try:
        if value == "" and "None" in kind:
            return None
        if kind.startswith("bool"):
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return low in ("true", "1", "yes")
        if kind.startswith("int"):
            return int(value, 0)
        if kind.startswith("float"):
            return float(value)
        return value
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def env_seed(default: int | None = None) -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def query_seed(seed: int, index: int) -> int:
    """Independent 64-bit ghost seed for query ``index``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


# -- report ---------------------------------------------------------------


@dataclass
class MatchReport:
    database: list
    queries: list
    expected: list  # planted database index per query, or None
    divergences: list  # query x database, primary backend
    best: list
    margins: list
    accuracy: float | None
    backend: str
    backend_used: str
    face_space: str
    snr: list
    eigenvalues: list
    qpe_eigenvalues: list
    config: dict
    config_hash: str
    seed: int
    quantum_divergences: list | None = None
    backend_deltas: list | None = None
    delta_bounds: list | None = None
    gate_counts: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {"schema": SCHEMA}
        d.update(dataclasses.asdict(self))
        d["versions"] = versions()
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def recompute_best(self) -> list:
        return [int(min(range(len(row)), key=lambda k: (row[k], k))) for row in self.divergences]


def versions() -> dict:
    import numba

    return {"qface": __version__, "numpy": np.__version__, "numba": numba.__version__,
            "python": platform.python_version()}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


# -- stages ---------------------------------------------------------------


def load_database(cfg: PipelineConfig) -> list[FaceImage]:
    faces = load_directory(cfg.images) if cfg.images else synthetic_faces(cfg.corpus_size, cfg.side, cfg.corpus_seed)
    _check_faces(faces, cfg.side, "database")
    if len(faces) < 2:
        raise EmptyInputError("need at least two database images")
    return faces


def _check_faces(faces, side, what):
    for f in faces:
        if f.shape != (side, side):
            raise ConfigError(f"{what} image {f.label!r} is {f.shape[0]}x{f.shape[1]}, config side is {side}")


def load_queries(cfg: PipelineConfig, database: list[FaceImage]):
    """Query faces and their planted database index (None when unknown)."""
    if cfg.queries:
        faces = load_directory(cfg.queries)
        if not faces:
            raise EmptyInputError(f"no query images in {cfg.queries}")
        _check_faces(faces, cfg.side, "query")
        labels = [f.label for f in database]
        return faces, [labels.index(f.label) if f.label in labels else None for f in faces]
    return list(database), list(range(len(database)))


def ghost_queries(cfg: PipelineConfig, faces):
    """Replace every query by its ghost image; returns (faces, snr, ghost images)."""
    out, snr, images = [], [], []
    for k, face in enumerate(faces):
        img = synthesize(face, cfg.ghost_config(query_seed(cfg.seed, k)))
        images.append(img)
        out.append(img.to_face(face.label))
        snr.append(img.snr)
    return out, snr, images


def eigenfaces(cfg: PipelineConfig, database):
    ts = TrainingSet.from_images([f.pixels for f in database], [f.label for f in database])
    basis = qpca_eigenfaces(build_covariance(ts), cfg.n, training=ts)
    basis.scores = scores(ts, basis)
    if cfg.r > basis.r:
        raise ConfigError(f"r={cfg.r} exceeds the {basis.r} nonzero eigenfaces of the database")
    return select_principal(basis, cfg.r)


def face_matrices(cfg: PipelineConfig, database, queries, basis):
    """SPD matrices for the database and queries, sharing one eps."""
    if cfg.feature_space:
        def raw(face):
            v = face.vector()
            nrm = np.linalg.norm(v)
            w = expand_face(v / nrm if nrm > 0 else v, basis).weights
            return np.real(symmetrize(np.outer(w, w.conj())))
        db_raw = [raw(f) for f in database]
        q_raw = [raw(f) for f in queries]
        eps = cfg.eps if cfg.eps is not None else _mean_diag_eps(db_raw)
        spd = lambda m: prepare_face_matrix(m.reshape(-1), 0.0, eps)  # noqa: E731
        return [spd(m) for m in db_raw], [spd(m) for m in q_raw], eps
    eps = cfg.eps
    if eps is None:
        eps = _mean_diag_eps([symmetrize(f.pixels) for f in database])
    return ([prepare_face_matrix(f.pixels, cfg.tau, eps) for f in database],
            [prepare_face_matrix(f.pixels, cfg.tau, eps) for f in queries], eps)


def _mean_diag_eps(mats) -> float:
    mean = float(np.mean([np.mean(np.real(np.diag(m))) for m in mats]))
    return EPS_FRACTION * mean if mean > 0 else EPS_FRACTION


def run_pipeline(cfg: PipelineConfig) -> MatchReport:
    warnings = []
    database = load_database(cfg)
    queries, expected = load_queries(cfg, database)
    snr, ghost_images = [None] * len(queries), []
    if cfg.ghost:
        queries, snr, ghost_images = ghost_queries(cfg, queries)
    basis = eigenfaces(cfg, database)
    db_mats, q_mats, eps = face_matrices(cfg, database, queries, basis)

    dim = db_mats[0].dim
    want_quantum = cfg.backend in ("quantum", "both")
    if want_quantum and dim > QUANTUM_MAX_DIM:
        msg = (f"face matrices are {dim}x{dim}; the quantum backend is capped at N <= {QUANTUM_MAX_DIM}, "
               "falling back to classical")
        log.warning(msg)
        warnings.append(msg)
        want_quantum = False
    classical = None
    if cfg.backend in ("classical", "both") or not want_quantum:
        classical = [[logdet_divergence(q, y).value for y in db_mats] for q in q_mats]
    quantum, deltas, bounds, counts = None, None, None, {}
    if want_quantum:
        quantum = []
        for q in q_mats:
            row = []
            for y in db_mats:
                res = logdet_divergence(q, y, "quantum", n=cfg.n)
                row.append(res.value)
                for k, v in res.gate_counts.items():
                    counts[k] = counts.get(k, 0) + v
            quantum.append(row)
        if classical is not None:
            deltas = [[abs(a - b) for a, b in zip(qr, cr)] for qr, cr in zip(quantum, classical)]
            bounds = [[divergence_error_bound(q, y, cfg.n) for y in db_mats] for q in q_mats]

    primary = quantum if cfg.backend == "quantum" and quantum is not None else classical
    used = "quantum" if primary is quantum else "classical"
    best, margins = [], []
    for row in primary:
        order = sorted(range(len(row)), key=lambda k: (row[k], k))
        best.append(order[0])
        margins.append(row[order[1]] - row[order[0]] if len(order) > 1 else math.inf)
    known = [(b, e) for b, e in zip(best, expected) if e is not None]
    accuracy = sum(b == e for b, e in known) / len(known) if known else None

    report = MatchReport(
        database=[f.label for f in database],
        queries=[f.label for f in queries],
        expected=expected,
        divergences=primary,
        best=best,
        margins=margins,
        accuracy=accuracy,
        backend=cfg.backend,
        backend_used=used,
        face_space="feature" if cfg.feature_space else "raw",
        snr=snr,
        eigenvalues=list(basis.eigenvalues),
        qpe_eigenvalues=list(basis.qpe_eigenvalues),
        config=cfg.as_dict() | {"eps_resolved": eps},
        config_hash=cfg.digest(),
        seed=cfg.seed,
        quantum_divergences=quantum if cfg.backend == "both" else None,
        backend_deltas=deltas,
        delta_bounds=bounds,
        gate_counts=counts,
        warnings=warnings,
    )
    report.config.pop("out")
    if cfg.out:
        write_outputs(cfg, report, basis, ghost_images)
    return report


def write_outputs(cfg: PipelineConfig, report: MatchReport, basis, ghost_images) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    if cfg.dump_images:
        for j in range(basis.r):
            face = np.real(basis.eigenfaces[:, j]).reshape(cfg.side, cfg.side)
            span = face.max() - face.min()
            write_pgm(out / "eigenfaces" / f"eigenface{j}.pgm", (face - face.min()) / span if span > 0 else face * 0)
        for label, img in zip(report.queries, ghost_images):
            img.save(out / "ghost" / f"{label}.pgm")
    return out / "report.json"


# -- gate-count sweep -------------------------------------------------------


@dataclass(frozen=True)
class SweepGrid:
    qft_widths: tuple = tuple(range(1, 9))
    trace_sizes: tuple = tuple(range(2, 9))
    trace_width: int = 4
    det_sizes: tuple = (2, 3, 4)
    det_precision: int = 4


def _row(circuit, size, precision, qubits, glog: GateLog):
    d = glog.as_dict()
    return {"circuit": circuit, "N": size, "n": precision, "qubits": qubits, **d}


def gate_count_sweep(grid: SweepGrid | None = None) -> list[dict]:
    """Measured gate counts per circuit family over the grid."""
    grid = SweepGrid() if grid is None else grid
    check_sweep_budget(grid)
    rows = []
    for m in grid.qft_widths:
        reg = QubitRegister([("q", m)], debug=False)
        apply_qft(reg, "q")
        rows.append(_row("qft", 0, m, m, reg.log))
    if grid.trace_sizes:
        acc = BinaryEncodedDiagonal.min_acc_width(max(grid.trace_sizes), grid.trace_width)
        top = (1 << grid.trace_width) - 1
        for size in grid.trace_sizes:
            reg = trace_circuit(BinaryEncodedDiagonal((top,) * size, grid.trace_width, acc))
            rows.append(_row("trace", size, grid.trace_width, acc, reg.log))
    n = grid.det_precision
    for size in grid.det_sizes:
        # integer spectrum kept inside (0, 2**n) so every run is exact
        spectrum = np.arange(size) % ((1 << n) - 1) + 1.0
        run = run_determinant(np.diag(spectrum), n)
        rows.append(_row("determinant", size, n, n + system_width(size) + 1 + size, run.log))
    return rows


def check_sweep_budget(grid: SweepGrid) -> None:
    """Reject the whole grid before running anything if any point exceeds the qubit cap."""
    if any(m < 1 for m in grid.qft_widths) or any(k < 1 for k in grid.trace_sizes + grid.det_sizes):
        raise ConfigError("sweep sizes must be positive")
    if grid.qft_widths and max(grid.qft_widths) > MAX_QUBITS:
        raise QubitBudgetError(f"QFT width {max(grid.qft_widths)} exceeds {MAX_QUBITS} qubits")
    if grid.trace_sizes:
        acc = BinaryEncodedDiagonal.min_acc_width(max(grid.trace_sizes), grid.trace_width)
        if acc > MAX_QUBITS:
            raise QubitBudgetError(f"trace accumulator needs {acc} qubits, cap is {MAX_QUBITS}")
    n = grid.det_precision
    if not 1 <= n <= MAX_PRECISION:
        raise ConfigError(f"determinant precision must lie in 1..{MAX_PRECISION}")
    for size in grid.det_sizes:
        run_q = n + system_width(size) + 1
        if run_q > MAX_QUBITS or size > MAX_QUBITS:
            raise QubitBudgetError(f"determinant N={size}, n={n} needs {run_q} qubits per run and "
                                   f"{size} product qubits, cap is {MAX_QUBITS}")


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def linear_fit(xs, ys):
    """Least-squares slope, intercept and R^2."""
    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
