"""Command-line entry point: ``qface <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .determinant import ROTATIONS, determinant_quantum
from .errors import ConfigError, QFaceError
from .ghost import FaceImage, GhostConfig, synthesize
from .pipeline import PipelineConfig, SweepGrid, env_seed, gate_count_sweep, run_pipeline, sweep_csv
from .selftest import run_selftest
from .trace_circuit import BinaryEncodedDiagonal, trace_quantum


def parse_matrix(text: str) -> np.ndarray:
    """Rows separated by ';', entries by ',' or whitespace; complex literals allowed."""
    try:
        rows = [[complex(tok) for tok in row.replace(",", " ").split()] for row in text.split(";") if row.strip()]
        arr = np.array(rows)
    except ValueError as exc:
        raise ConfigError(f"cannot parse matrix {text!r}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"matrix {text!r} is not square")
    return arr.real if np.all(arr.imag == 0) else arr


def parse_ints(text: str) -> tuple:
    """'2..8' or '1,2,4'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer list {text!r}") from exc


def _format(value: float) -> str:
    r = round(value)
    return str(int(r)) if abs(value - r) < 1e-9 else f"{value:.12g}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qface", description="Simulated quantum face recognition on ghost images.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full recognition pipeline, writes report.json")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--seed", type=int)
    run.add_argument("--backend", choices=["classical", "quantum", "both"])
    run.add_argument("--out", help="output directory")
    run.add_argument("--images", help="database directory of PGM faces")
    run.add_argument("--queries", help="query directory of PGM faces")
    run.add_argument("--frames", type=int)
    run.add_argument("--no-ghost", dest="ghost", action="store_const", const=False)
    run.add_argument("--feature-space", dest="feature_space", action="store_const", const=True)
    run.add_argument("--dump-images", dest="dump_images", action="store_const", const=True)

    gh = sub.add_parser("ghost", help="ghost-image one PGM")
    gh.add_argument("image")
    gh.add_argument("--out", required=True, help="output PGM (a .txt sidecar is written next to it)")
    gh.add_argument("--frames", type=int, default=300)
    gh.add_argument("--pairs", type=int, default=16)
    gh.add_argument("--jitter", type=float, default=0.5)
    gh.add_argument("--dark-rate", type=float, default=0.01)
    gh.add_argument("--seed", type=int)

    det = sub.add_parser("det", help="determinant through the phase-estimation circuit")
    det.add_argument("--matrix", required=True, help="e.g. '1 0; 0 2'")
    det.add_argument("--n", type=int, default=4)
    det.add_argument("--rotation", choices=ROTATIONS, default="idealized")

    tr = sub.add_parser("trace", help="trace of a non-negative integer diagonal through the adder chain")
    tr.add_argument("--diag", required=True, help="e.g. '3,5,7'")
    tr.add_argument("--width", type=int)

    sw = sub.add_parser("sweep", help="gate counts per circuit family as CSV")
    sw.add_argument("--qft", default="1..8")
    sw.add_argument("--trace-n", default="2..8")
    sw.add_argument("--trace-width", type=int, default=4)
    sw.add_argument("--det-n", default="2..4")
    sw.add_argument("--precision", type=int, default=4)
    sw.add_argument("--out", help="CSV path (stdout when omitted)")

    sub.add_parser("selftest", help="run the invariant checks")

    co = sub.add_parser("corpus", help="write the synthetic face corpus as PGMs")
    co.add_argument("--out", required=True)
    co.add_argument("--count", type=int, default=8)
    co.add_argument("--side", type=int, default=16)
    co.add_argument("--seed", type=int, default=0)
    return p


def cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in
                 ("backend", "out", "images", "queries", "frames", "ghost", "feature_space", "dump_images")}
    overrides["seed"] = args.seed if args.seed is not None else env_seed()
    if args.config:
        cfg = PipelineConfig.from_file(args.config, **overrides)
    else:
        cfg = PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
    report = run_pipeline(cfg)
    if cfg.out is None:
        sys.stdout.write(report.to_json())
    else:
        print(str(Path(cfg.out) / "report.json"))
    return 0


def cmd_ghost(args) -> int:
    seed = args.seed if args.seed is not None else env_seed(0)
    try:
        cfg = GhostConfig(args.frames, args.pairs, None, args.jitter, seed, args.dark_rate)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    img = synthesize(FaceImage.from_pgm(args.image), cfg)
    print(img.save(args.out))
    return 0


def cmd_det(args) -> int:
    print(_format(determinant_quantum(parse_matrix(args.matrix), args.n, rotation=args.rotation)))
    return 0


def cmd_trace(args) -> int:
    print(trace_quantum(BinaryEncodedDiagonal.from_values(parse_ints(args.diag), args.width)))
    return 0


def cmd_sweep(args) -> int:
    grid = SweepGrid(parse_ints(args.qft), parse_ints(args.trace_n), args.trace_width,
                     parse_ints(args.det_n), args.precision)
    text = sweep_csv(gate_count_sweep(grid))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_selftest(args) -> int:
    return 0 if run_selftest() else 1


def cmd_corpus(args) -> int:
    from .corpus import write_corpus

    for path in write_corpus(args.out, args.count, args.side, args.seed):
        print(path)
    return 0


COMMANDS = {"run": cmd_run, "ghost": cmd_ghost, "det": cmd_det, "trace": cmd_trace,
            "sweep": cmd_sweep, "selftest": cmd_selftest, "corpus": cmd_corpus}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except QFaceError as exc:
        print(f"qface: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
