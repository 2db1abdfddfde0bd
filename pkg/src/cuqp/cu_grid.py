"""Flat CU grid at a fixed quadtree depth and per-channel sub-block geometry.

A CU at depth ``d`` is a 2Nx2N luma square with 2N = 64 >> d. Its four NxN
luma quadrants map onto each chroma plane through the format's decimation:
N x N for 4:4:4, (N/2) x N for 4:2:2 and (N/2) x (N/2) for 4:2:0. CUs and
quadrants on the right/bottom frame border are clipped to the picture;
quadrants left with no samples are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .video_io import VideoSpec

LCU_SIZE = 64
MAX_DEPTH = 2
CHANNELS = ("Y", "Cb", "Cr")


class Rect(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class CuNode:
    x: int
    y: int
    size_2n: int
    depth: int
    clipped_w: int
    clipped_h: int

    @property
    def half(self) -> int:
        """N, the nominal luma sub-block size."""
        return self.size_2n // 2

    @property
    def footprint(self) -> Rect:
        return Rect(self.x, self.y, self.clipped_w, self.clipped_h)


@dataclass(frozen=True)
class SubBlockGeom:
    channel: str
    rects: tuple[Rect, ...]


def cu_size(depth: int) -> int:
    if depth not in range(MAX_DEPTH + 1):
        raise ValueError(f"analysis depth must be 0, 1 or 2, got {depth}")
    return LCU_SIZE >> depth


def grid_shape(spec: VideoSpec, depth: int) -> tuple[int, int]:
    """(rows, cols) of the CU grid."""
    size = cu_size(depth)
    return -(-spec.height // size), -(-spec.width // size)


def enumerate_cus(spec: VideoSpec, depth: int = 0) -> list[CuNode]:
    """CUs of the frame in raster order, border CUs clipped."""
    size = cu_size(depth)
    cus = []
    for y in range(0, spec.height, size):
        for x in range(0, spec.width, size):
            cus.append(CuNode(x, y, size, depth,
                              min(size, spec.width - x), min(size, spec.height - y)))
    return cus


def _clip(rect: Rect, cols: int, rows: int):
    w = min(rect.x + rect.w, cols) - rect.x
    h = min(rect.y + rect.h, rows) - rect.y
    if w <= 0 or h <= 0:
        return None
    return Rect(rect.x, rect.y, w, h)


def _quadrants(x: int, y: int, w: int, h: int) -> list[Rect]:
    return [Rect(x, y, w, h), Rect(x + w, y, w, h),
            Rect(x, y + h, w, h), Rect(x + w, y + h, w, h)]


def sub_blocks(cu: CuNode, spec: VideoSpec) -> dict[str, SubBlockGeom]:
    """Sub-block rectangles of ``cu`` in each present channel's own plane coordinates."""
    n = cu.half
    geoms = {}
    luma = [_clip(r, spec.width, spec.height) for r in _quadrants(cu.x, cu.y, n, n)]
    geoms["Y"] = SubBlockGeom("Y", tuple(r for r in luma if r is not None))

    sub = spec.chroma_format.subsampling
    if sub is None:
        return geoms
    sx, sy = sub
    rows, cols = spec.chroma_shape
    quads = _quadrants(cu.x // sx, cu.y // sy, n // sx, n // sy)
    rects = tuple(r for r in (_clip(q, cols, rows) for q in quads) if r is not None)
    for ch in ("Cb", "Cr"):
        geoms[ch] = SubBlockGeom(ch, rects)
    return geoms
