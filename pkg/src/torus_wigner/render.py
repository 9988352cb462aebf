"""Binary PGM (P5) rendering of Wigner grids.

Pixel column is q, pixel row is 2N - 1 - p, so p grows upward.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .wigner import WignerGrid

COLOR_MAPS = ("sign", "linear")


def grid_to_pixels(grid: WignerGrid, cmap: str = "sign", scale: float | None = None) -> np.ndarray:
    """Map W to 8-bit grey levels.

    ``sign``: 128 at zero, darker for positive, lighter for negative, with
    ``scale`` (default max |W|) mapped to the ends.  ``linear``: min..max to
    white..black.
    """
    if cmap not in COLOR_MAPS:
        raise ValueError(f"unknown colour map {cmap!r}")
    if scale is not None and not scale > 0:
        raise ValueError("scale must be positive")
    v = grid.values
    if cmap == "sign":
        vmax = scale if scale is not None else float(np.abs(v).max())
        if vmax == 0:
            levels = np.full(v.shape, 128.0)
        else:
            levels = 128 - np.floor(127 * np.clip(v / vmax, -1, 1) + 0.5)
    else:
        lo, hi = float(v.min()), float(v.max())
        if scale is not None:
            lo, hi = -scale, scale
        if math.isclose(hi, lo):
            levels = np.full(v.shape, 128.0)
        else:
            levels = 255 - np.floor(255 * np.clip((v - lo) / (hi - lo), 0, 1) + 0.5)
    # rows top to bottom are p = 2N-1 .. 0, columns are q
    return levels.T[::-1].astype(np.uint8)


def encode_pgm(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    body = parts[4]
    if len(body) != w * h:
        raise ValueError("PGM pixel count mismatch")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w)


def write_pgm(grid: WignerGrid, path, cmap: str = "sign", scale: float | None = None) -> None:
    Path(path).write_bytes(encode_pgm(grid_to_pixels(grid, cmap, scale)))
