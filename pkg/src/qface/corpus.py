"""Procedural desk-scale face corpus.

Each identity draws head shape, skin tone, eye spacing and size, brow and
mouth geometry and hair line from a seeded generator, then renders them on
normalized coordinates. Nothing here is photographic; it only has to give
distinct, face-like rasters to recognize.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ghost import FaceImage

DEFAULT_IDENTITIES = 8
DEFAULT_SIDE = 16


def _ellipse(x, y, cx, cy, ax, ay):
    return ((x - cx) / ax) ** 2 + ((y - cy) / ay) ** 2 <= 1.0


def render_face(params: dict, side: int = DEFAULT_SIDE) -> np.ndarray:
    c = (np.arange(side) + 0.5) / side * 2.0 - 1.0
    y, x = np.meshgrid(c, c, indexing="ij")
    img = np.zeros((side, side))
    head = _ellipse(x, y, 0.0, 0.05, params["head_w"], params["head_h"])
    img[head] = params["skin"]
    hair = head & (y < params["hairline"])
    img[hair] = params["hair"]
    for sx in (-1.0, 1.0):
        ex = sx * params["eye_dx"]
        img[_ellipse(x, y, ex, params["eye_y"], params["eye_r"], params["eye_r"] * 0.7)] = params["eye"]
        brow = (np.abs(x - ex) <= params["eye_r"] * 1.2) & (np.abs(y - (params["eye_y"] - params["brow_gap"])) <= 0.07)
        img[brow & head] = params["hair"]
    nose = (np.abs(x) <= params["nose_w"]) & (y > params["eye_y"]) & (y < params["mouth_y"] - 0.15)
    img[nose & head] = min(1.0, params["skin"] + 0.12)
    img[_ellipse(x, y, 0.0, params["mouth_y"], params["mouth_w"], 0.08) & head] = params["mouth"]
    return np.clip(img, 0.0, 1.0)


def random_params(rng: np.random.Generator) -> dict:
    return {
        "head_w": rng.uniform(0.6, 0.9),
        "head_h": rng.uniform(0.75, 0.95),
        "skin": rng.uniform(0.5, 0.9),
        "hair": rng.uniform(0.05, 0.45),
        "hairline": rng.uniform(-0.7, -0.35),
        "eye_dx": rng.uniform(0.2, 0.45),
        "eye_y": rng.uniform(-0.3, -0.05),
        "eye_r": rng.uniform(0.1, 0.2),
        "eye": rng.uniform(0.0, 0.25),
        "brow_gap": rng.uniform(0.15, 0.3),
        "nose_w": rng.uniform(0.04, 0.12),
        "mouth_y": rng.uniform(0.35, 0.6),
        "mouth_w": rng.uniform(0.15, 0.4),
        "mouth": rng.uniform(0.1, 0.4),
    }


def synthetic_faces(count: int = DEFAULT_IDENTITIES, side: int = DEFAULT_SIDE, seed: int = 0) -> list[FaceImage]:
    rng = np.random.Generator(np.random.PCG64(seed))
    return [FaceImage(render_face(random_params(rng), side), f"id{k:02d}") for k in range(count)]


def write_corpus(directory, count: int = DEFAULT_IDENTITIES, side: int = DEFAULT_SIDE, seed: int = 0) -> list[Path]:
    directory = Path(directory)
    return [face.to_pgm(directory / f"{face.label}.pgm") for face in synthetic_faces(count, side, seed)]


def load_directory(directory) -> list[FaceImage]:
    """Every ``*.pgm`` in the directory, sorted by file name."""
    paths = sorted(Path(directory).glob("*.pgm"))
    return [FaceImage.from_pgm(p) for p in paths]
