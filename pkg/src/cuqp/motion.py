"""Per-CU integer motion search and the temporal-masking increment.

Each CU gets one luma motion vector from a full search against the previous
frame. A vector (dx, dy) says the block content moved by (dx, dy) from the
reference to the current frame, so the matched reference window sits at
(x - dx, y - dy). Cost is luma SAD; among equal costs the smallest
magnitude wins, then the smaller dy, then the smaller dx (signed).

Windows that would leave the reference frame are clamped to it. A clamped
candidate always duplicates the cost of an in-frame candidate with a strictly
smaller magnitude, so the search only visits in-frame positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .cu_grid import CuNode
from .errors import NoCusError, SpecMismatchError
from .video_io import Frame

DEFAULT_SEARCH_RANGE = 16


class MotionVector(NamedTuple):
    mv_x: int
    mv_y: int


@dataclass(frozen=True)
class MotionField:
    vectors: tuple
    magnitudes: tuple
    mvm: float
    frame_index: int
    cu_count: int

    @property
    def increments(self) -> tuple:
        return tuple(temporal_increment(m, self.mvm) for m in self.magnitudes)


def estimate_cu_mv(cur: Frame, ref: Frame, cu: CuNode,
                   search_range: int = DEFAULT_SEARCH_RANGE) -> MotionVector:
    if cur.y_plane.shape != ref.y_plane.shape:
        raise SpecMismatchError("spec mismatch: current and reference luma planes differ in size")
    rows, cols = cur.y_plane.shape
    x, y, w, h = cu.footprint
    block = cur.y_plane[y:y + h, x:x + w].astype(np.int32)

    # window top-left px = x - dx must stay in [0, cols - w]
    dx_lo = max(-search_range, x - (cols - w))
    dx_hi = min(search_range, x)
    dy_lo = max(-search_range, y - (rows - h))
    dy_hi = min(search_range, y)

    # region covering every window: px in [x - dx_hi, x - dx_lo]
    region = ref.y_plane[y - dy_hi:y - dy_lo + h, x - dx_hi:x - dx_lo + w].astype(np.int32)
    windows = sliding_window_view(region, (h, w))
    sad = np.abs(windows - block).sum(axis=(2, 3), dtype=np.int64)
    # sad[i, j] is the window at px = x - dx_hi + j, i.e. dx = dx_hi - j
    dys = dy_hi - np.arange(sad.shape[0])
    dxs = dx_hi - np.arange(sad.shape[1])
    DY, DX = np.meshgrid(dys, dxs, indexing="ij")
    keys = np.lexsort((DX.ravel(), DY.ravel(), (DX * DX + DY * DY).ravel(), sad.ravel()))
    best = keys[0]
    return MotionVector(int(DX.flat[best]), int(DY.flat[best]))


def magnitude(mv: MotionVector) -> float:
    return math.hypot(mv[0], mv[1])


def frame_mvm(magnitudes: Sequence[float]) -> float:
    """Arithmetic mean motion-vector magnitude over the CUs of one frame."""
    if len(magnitudes) == 0:
        raise NoCusError("no CUs: cannot average an empty motion field")
    mean = math.fsum(magnitudes) / len(magnitudes)
    # the division can overshoot by an ulp; a uniform field must not flag every CU
    return min(max(mean, min(magnitudes)), max(magnitudes))


def temporal_increment(m: float, mvm: float) -> int:
    return 1 if m > mvm else 0


def motion_field(cur: Frame, ref: Optional[Frame], cus: Sequence[CuNode],
                 search_range: int = DEFAULT_SEARCH_RANGE) -> MotionField:
    """Motion of every CU of ``cur``; with no reference all vectors are zero."""
    if ref is None:
        vectors = tuple(MotionVector(0, 0) for _ in cus)
    else:
        vectors = tuple(estimate_cu_mv(cur, ref, cu, search_range) for cu in cus)
    mags = tuple(magnitude(v) for v in vectors)
    return MotionField(vectors, mags, frame_mvm(mags), cur.index, len(cus))
