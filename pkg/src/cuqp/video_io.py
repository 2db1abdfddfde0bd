"""Raw planar YCbCr file access.

Frames are stored fully planar: all Y rows, then all Cb rows, then all Cr
rows, row-major. 8-bit samples take one byte; 10-bit samples live in
16-bit little-endian containers, LSB aligned. There is no header, so the
geometry always comes from a :class:`VideoSpec` supplied by the caller.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import BinaryIO, Iterator, Optional

import numpy as np

from .errors import SampleRangeError, ShortReadError, SpecMismatchError


class ChromaFormat(enum.Enum):
    YUV444 = "444"
    YUV422 = "422"
    YUV420 = "420"
    YUV400 = "400"

    @classmethod
    def parse(cls, text: str) -> "ChromaFormat":
        key = str(text).replace(":", "").strip()
        for fmt in cls:
            if fmt.value == key:
                return fmt
        raise ValueError(f"unknown chroma format {text!r}")

    @property
    def subsampling(self) -> Optional[tuple[int, int]]:
        """Horizontal and vertical chroma decimation, or None for 4:0:0."""
        return _SUBSAMPLING[self]

    @property
    def has_chroma(self) -> bool:
        return self is not ChromaFormat.YUV400

    @property
    def label(self) -> str:
        return ":".join(self.value)


_SUBSAMPLING = {
    ChromaFormat.YUV444: (1, 1),
    ChromaFormat.YUV422: (2, 1),
    ChromaFormat.YUV420: (2, 2),
    ChromaFormat.YUV400: None,
}


@dataclass(frozen=True)
class VideoSpec:
    width: int
    height: int
    chroma_format: ChromaFormat = ChromaFormat.YUV420
    bit_depth: int = 8
    frame_count: int = 0

    def __post_init__(self):
        if isinstance(self.chroma_format, str):
            object.__setattr__(self, "chroma_format", ChromaFormat.parse(self.chroma_format))
        if self.width < 8 or self.height < 8:
            raise ValueError(f"frame must be at least 8x8, got {self.width}x{self.height}")
        if self.bit_depth not in (8, 10):
            raise ValueError(f"bit depth must be 8 or 10, got {self.bit_depth}")
        if self.frame_count < 0:
            raise ValueError("frame_count must be non-negative")
        sub = self.chroma_format.subsampling
        if sub is not None:
            if sub[0] == 2 and self.width % 2:
                raise ValueError(f"{self.chroma_format.label} needs an even width")
            if sub[1] == 2 and self.height % 2:
                raise ValueError(f"{self.chroma_format.label} needs an even height")

    @property
    def chroma_shape(self) -> Optional[tuple[int, int]]:
        """(rows, cols) of each chroma plane, None for 4:0:0."""
        sub = self.chroma_format.subsampling
        if sub is None:
            return None
        return self.height // sub[1], self.width // sub[0]

    @property
    def container_bytes(self) -> int:
        return 1 if self.bit_depth == 8 else 2

    @property
    def max_sample(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def frame_bytes(self) -> int:
        samples = self.width * self.height
        chroma = self.chroma_shape
        if chroma is not None:
            samples += 2 * chroma[0] * chroma[1]
        return samples * self.container_bytes

    def with_frame_count(self, n: int) -> "VideoSpec":
        return VideoSpec(self.width, self.height, self.chroma_format, self.bit_depth, n)


def _freeze(plane):
    if plane is None:
        return None
    arr = np.array(plane, dtype=np.uint16, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """One decoded picture. Planes are read-only uint16 arrays indexed [row, col]."""

    y_plane: np.ndarray
    cb_plane: Optional[np.ndarray] = None
    cr_plane: Optional[np.ndarray] = None
    index: int = 0
    chroma_format: ChromaFormat = ChromaFormat.YUV420
    bit_depth: int = 8

    def __post_init__(self):
        if isinstance(self.chroma_format, str):
            object.__setattr__(self, "chroma_format", ChromaFormat.parse(self.chroma_format))
        object.__setattr__(self, "y_plane", _freeze(self.y_plane))
        object.__setattr__(self, "cb_plane", _freeze(self.cb_plane))
        object.__setattr__(self, "cr_plane", _freeze(self.cr_plane))

    @property
    def width(self) -> int:
        return self.y_plane.shape[1]

    @property
    def height(self) -> int:
        return self.y_plane.shape[0]

    @property
    def spec(self) -> VideoSpec:
        return VideoSpec(self.width, self.height, self.chroma_format, self.bit_depth)

    def plane(self, channel: str) -> Optional[np.ndarray]:
        return {"Y": self.y_plane, "Cb": self.cb_plane, "Cr": self.cr_plane}[channel]

    def planes(self) -> list[np.ndarray]:
        return [p for p in (self.y_plane, self.cb_plane, self.cr_plane) if p is not None]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        if (self.index, self.chroma_format, self.bit_depth) != (
            other.index, other.chroma_format, other.bit_depth
        ):
            return False
        for a, b in zip((self.y_plane, self.cb_plane, self.cr_plane),
                        (other.y_plane, other.cb_plane, other.cr_plane)):
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        return True

    __hash__ = None


def check_frame(frame: Frame, spec: VideoSpec) -> None:
    """Raise SpecMismatchError unless ``frame`` has the geometry ``spec`` describes."""
    if frame.chroma_format is not spec.chroma_format or frame.bit_depth != spec.bit_depth:
        raise SpecMismatchError(
            f"spec mismatch: frame is {frame.chroma_format.label} {frame.bit_depth}-bit, "
            f"spec is {spec.chroma_format.label} {spec.bit_depth}-bit"
        )
    if frame.y_plane.shape != (spec.height, spec.width):
        raise SpecMismatchError(
            f"spec mismatch: luma plane {frame.y_plane.shape[::-1]} vs {spec.width}x{spec.height}"
        )
    chroma = spec.chroma_shape
    for name, plane in (("Cb", frame.cb_plane), ("Cr", frame.cr_plane)):
        if chroma is None:
            if plane is not None:
                raise SpecMismatchError(f"spec mismatch: 4:0:0 frame carries a {name} plane")
        elif plane is None or plane.shape != chroma:
            got = None if plane is None else plane.shape
            raise SpecMismatchError(f"spec mismatch: {name} plane {got}, expected {chroma}")
    for plane in frame.planes():
        if plane.size and int(plane.max()) > spec.max_sample:
            raise SpecMismatchError(
                f"spec mismatch: sample {int(plane.max())} exceeds {spec.bit_depth}-bit range"
            )


def _plane_shapes(spec: VideoSpec) -> list[tuple[int, int]]:
    shapes = [(spec.height, spec.width)]
    chroma = spec.chroma_shape
    if chroma is not None:
        shapes += [chroma, chroma]
    return shapes


def decode_frame(buf: bytes, spec: VideoSpec, index: int = 0, offset: int = 0) -> Frame:
    """Decode one frame from an in-memory buffer that holds exactly ``spec.frame_bytes``."""
    dtype = np.dtype(np.uint8) if spec.bit_depth == 8 else np.dtype("<u2")
    planes = []
    pos = 0
    for rows, cols in _plane_shapes(spec):
        n = rows * cols
        data = np.frombuffer(buf, dtype=dtype, count=n, offset=pos).reshape(rows, cols)
        if spec.bit_depth != 8:
            bad = np.flatnonzero(data > spec.max_sample)
            if bad.size:
                at = offset + pos + int(bad[0]) * dtype.itemsize
                raise SampleRangeError(
                    f"sample out of range: {int(data.flat[bad[0]])} at byte offset {at} "
                    f"exceeds {spec.max_sample}"
                )
        planes.append(data.astype(np.uint16))
        pos += n * dtype.itemsize
    y = planes[0]
    cb = planes[1] if len(planes) > 1 else None
    cr = planes[2] if len(planes) > 1 else None
    return Frame(y, cb, cr, index=index, chroma_format=spec.chroma_format, bit_depth=spec.bit_depth)


def read_frame(source: BinaryIO, spec: VideoSpec, index: int) -> Frame:
    """Read frame ``index`` from a seekable binary stream."""
    if index < 0:
        raise ValueError("frame index must be non-negative")
    offset = index * spec.frame_bytes
    source.seek(offset)
    buf = source.read(spec.frame_bytes)
    if len(buf) != spec.frame_bytes:
        raise ShortReadError(
            f"short read: frame {index} needs {spec.frame_bytes} bytes at byte offset {offset}, "
            f"stream ended at byte offset {offset + len(buf)}"
        )
    return decode_frame(buf, spec, index, offset)


def encode_frame(frame: Frame, spec: VideoSpec) -> bytes:
    check_frame(frame, spec)
    dtype = np.uint8 if spec.bit_depth == 8 else np.dtype("<u2")
    return b"".join(np.ascontiguousarray(p, dtype=dtype).tobytes() for p in frame.planes())


def write_frame(sink: BinaryIO, frame: Frame, spec: VideoSpec) -> int:
    """Append ``frame`` to ``sink``; returns the number of bytes written."""
    data = encode_frame(frame, spec)
    sink.write(data)
    return len(data)


def count_frames(path, spec: VideoSpec) -> int:
    """Number of whole frames in a raw file. A trailing partial frame is an error."""
    size = os.path.getsize(path)
    n, rest = divmod(size, spec.frame_bytes)
    if rest:
        raise ShortReadError(
            f"short read: {path} is {size} bytes, frame {n} is truncated at byte offset "
            f"{n * spec.frame_bytes} ({rest} of {spec.frame_bytes} bytes present)"
        )
    return n


def iter_frames(path, spec: VideoSpec) -> Iterator[Frame]:
    n = spec.frame_count or count_frames(path, spec)
    with open(path, "rb") as fh:
        for i in range(n):
            yield read_frame(fh, spec, i)


def write_video(path, frames, spec: VideoSpec) -> int:
    total = 0
    with open(path, "wb") as fh:
        for frame in frames:
            total += write_frame(fh, frame, spec)
    return total
