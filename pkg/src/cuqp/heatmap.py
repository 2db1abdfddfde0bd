"""One-pixel-per-CU grayscale rendering of QP maps as binary PGM."""

from __future__ import annotations

import numpy as np

from .qp_synth import QpMap


def heatmap_pixels(qp_map: QpMap) -> np.ndarray:
    """uint8 image of the map: min QP -> 0, max QP -> 255, constant map -> 128."""
    qps = np.array(qp_map.cu_qps, dtype=np.int64).reshape(qp_map.grid)
    lo, hi = int(qps.min()), int(qps.max())
    if lo == hi:
        return np.full(qps.shape, 128, dtype=np.uint8)
    # round half up, integer-exact: floor((2*255*(v-lo) + span) / (2*span))
    span = hi - lo
    return ((510 * (qps - lo) + span) // (2 * span)).astype(np.uint8)


def pgm_bytes(pixels: np.ndarray) -> bytes:
    rows, cols = pixels.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def write_pgm(path, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(pixels))
