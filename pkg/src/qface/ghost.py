"""Monte-Carlo ghost imaging.

Each photon pair hits a uniformly random object pixel; the partner lands on
the camera at the same position displaced by Gaussian jitter. A coincidence
is recorded when the object photon is transmitted (probability T at that
pixel). Dark counts are Binomial(frames, p_dark) per camera pixel. The
estimate divides counts by each pixel's own illumination.

Every frame draws from its own PCG64 stream keyed by (seed, frame index), so
splitting the frame range over workers and summing gives the same counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pgm
from .errors import EmptyInputError
from .kernels import coincidences

DEFAULT_FRAMES = 300
DEFAULT_PAIRS_PER_FRAME = 64
_DARK_STREAM = 1 << 32  # spawn key reserved for dark counts, beyond any frame index


@dataclass(frozen=True)
class FaceImage:
    """Greyscale face with pixel values in [0, 1]."""

    pixels: np.ndarray
    label: str = ""

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.float64)
        if p.ndim != 2:
            raise ValueError("face image must be 2-D")
        if p.size == 0 or np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise ValueError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", p)

    @property
    def shape(self):
        return self.pixels.shape

    def vector(self) -> np.ndarray:
        return self.pixels.reshape(-1)

    @classmethod
    def from_pgm(cls, path, label: str | None = None) -> "FaceImage":
        path = Path(path)
        return cls(pgm.read_pgm(path) / 255.0, path.stem if label is None else label)

    def to_pgm(self, path) -> Path:
        return pgm.write_pgm(path, self.pixels)


@dataclass(frozen=True)
class GhostConfig:
    frames: int = DEFAULT_FRAMES
    pairs_per_frame: int = DEFAULT_PAIRS_PER_FRAME
    mask: np.ndarray | None = field(default=None, repr=False)  # optional aperture multiplying the face
    jitter: float = 0.0  # pixels
    seed: int = 0
    dark_rate: float = 0.0  # per pixel per frame

    def __post_init__(self):
        if self.frames < 0:
            raise ValueError("frames must be non-negative")
        if self.pairs_per_frame < 0:
            raise ValueError("pairs_per_frame must be non-negative")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")
        if not 0.0 <= self.dark_rate <= 1.0:
            raise ValueError("dark_rate is a probability")
        if self.mask is not None:
            m = np.asarray(self.mask, dtype=np.float64)
            if np.any(m < 0) or np.any(m > 1):
                raise ValueError("mask values must lie in [0, 1]")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class GhostImage:
    counts: np.ndarray
    illumination: np.ndarray
    estimate: np.ndarray
    total_pairs: int
    frames: int
    seed: int
    snr: float | None = None

    def to_face(self, label: str = "") -> FaceImage:
        return FaceImage(self.estimate, label)

    def save(self, path) -> Path:
        """PGM of the estimate plus a sidecar ``.txt`` with the count metadata."""
        path = pgm.write_pgm(path, self.estimate)
        pgm.write_sidecar(path.with_suffix(".txt"), {
            "frames": self.frames,
            "seed": self.seed,
            "total_pairs": self.total_pairs,
            "total_counts": int(self.counts.sum()),
        })
        return path


def _stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def frame_counts(transmission: np.ndarray, cfg: GhostConfig, start: int, stop: int):
    """Coincidences and illumination accumulated over frames [start, stop)."""
    h, w = transmission.shape
    flat = np.ascontiguousarray(transmission.reshape(-1))
    counts = np.zeros(h * w, dtype=np.int64)
    illum = np.zeros(h * w, dtype=np.int64)
    m = cfg.pairs_per_frame
    if m == 0 or stop <= start:
        return counts, illum
    for f in range(start, stop):
        rng = _stream(cfg.seed, f)
        obj = rng.integers(0, h * w, m)
        u = rng.random(m)
        if cfg.jitter > 0:
            d = rng.normal(0.0, cfg.jitter, (2, m))
            r = obj // w + np.rint(d[0]).astype(np.int64)
            c = obj % w + np.rint(d[1]).astype(np.int64)
            inside = (r >= 0) & (r < h) & (c >= 0) & (c < w)
            cam = np.where(inside, r * w + c, -1)
        else:
            cam = obj
        k, n = coincidences(obj, cam, flat, u)
        counts += k
        illum += n
    return counts, illum


def synthesize(truth, cfg: GhostConfig | None = None, *, mask=None) -> GhostImage:
    """Ghost image of ``truth`` (a FaceImage or 2-D array in [0, 1]).

    ``mask`` marks the signal region for the SNR estimate; by default the
    pixels with nonzero transmission.
    """
    cfg = GhostConfig() if cfg is None else cfg
    t = truth.pixels if isinstance(truth, FaceImage) else FaceImage(truth).pixels
    if cfg.mask is not None:
        t = t * np.asarray(cfg.mask, dtype=np.float64)
    counts, illum = frame_counts(t, cfg, 0, cfg.frames)
    if cfg.dark_rate > 0 and cfg.frames > 0:
        counts = counts + _stream(cfg.seed, _DARK_STREAM).binomial(cfg.frames, cfg.dark_rate, counts.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(illum > 0, counts / np.maximum(illum, 1), 0.0)
    est = np.clip(est, 0.0, 1.0).reshape(t.shape)
    img = GhostImage(counts.reshape(t.shape), illum.reshape(t.shape), est,
                     cfg.frames * cfg.pairs_per_frame, cfg.frames, cfg.seed)
    signal = (t > 0) if mask is None else np.asarray(mask, dtype=bool)
    if signal.any() and not signal.all():
        img.snr = snr_estimate(img, signal)
    return img


def snr_estimate(img: GhostImage, mask) -> float:
    """mean(estimate on mask) / std(estimate off mask).

    0 with no recorded pairs, inf when the background is noiseless.
    """
    m = np.asarray(mask, dtype=bool)
    if m.shape != img.estimate.shape:
        raise ValueError("mask shape differs from the image")
    if not m.any():
        raise EmptyInputError("signal region is empty")
    if m.all():
        raise EmptyInputError("background region is empty")
    if img.total_pairs == 0:
        return 0.0
    signal = float(np.mean(img.estimate[m]))
    noise = float(np.std(img.estimate[~m]))
    if noise == 0.0:
        return math.inf if signal > 0 else 0.0
    return signal / noise
