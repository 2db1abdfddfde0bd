"""Frame-level Lagrange multiplier and the lambda-refined QP.

    lambda = H * W_k * 2 ** ((QP - 12) / 3)
    q      = 4.2005 * ln(lambda) + 13.7122

W_k is 0.57 for intra pictures and 0.68 * clip((QP - 12) / 6, 2, 4) for
random-access B pictures. H is 1 for non-referenced pictures and
1 - clip(0.05 * BF, 0, 0.5) for referenced ones.

The two ``min(...)`` expressions are commonly printed with three arguments,
``min(2.0, 4.0, x)`` and ``min(0, 0.5, 0.005 * BF)``. Read literally these
pin W_k to 0.68 * 2 above QP 24 and H to exactly 1. ``ClampMode.LITERAL``
reproduces that reading; ``ClampMode.CLAMP`` (default) treats both as
clip-to-interval, which is what the reference encoder computes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import InvalidLambdaError

QP_MIN = 0
QP_MAX = 51


class ClampMode(enum.Enum):
    CLAMP = "clamp"
    LITERAL = "literal"

    @classmethod
    def parse(cls, text) -> "ClampMode":
        if isinstance(text, cls):
            return text
        aliases = {"clamp": cls.CLAMP, "literal": cls.LITERAL}
        try:
            return aliases[str(text)]
        except KeyError:
            raise ValueError(f"unknown clamp mode {text!r}") from None


@dataclass(frozen=True)
class GopFrameClass:
    slice_type: str = "I"
    hierarchy_level: int = 0
    qp_offset: int = 0
    referenced: bool = True
    b_frame_count: int = 0

    def __post_init__(self):
        if self.slice_type not in ("I", "B"):
            raise ValueError(f"slice type must be I or B, got {self.slice_type!r}")
        if self.slice_type == "I" and (self.hierarchy_level or self.qp_offset):
            raise ValueError("I pictures sit at hierarchy level 0 with QP offset 0")
        if self.b_frame_count < 0 or self.hierarchy_level < 0:
            raise ValueError("hierarchy level and B-frame count must be non-negative")

    @property
    def is_intra(self) -> bool:
        return self.slice_type == "I"


INTRA = GopFrameClass("I", 0, 0, True, 0)


@dataclass(frozen=True)
class LambdaParams:
    slope_p: float = 4.2005
    intercept_z: float = 13.7122
    clamp_mode: ClampMode = ClampMode.CLAMP

    def __post_init__(self):
        object.__setattr__(self, "clamp_mode", ClampMode.parse(self.clamp_mode))


def clip_qp(qp) -> int:
    return max(QP_MIN, min(QP_MAX, int(qp)))


def weight_wk(cls: GopFrameClass, frame_qp: int, mode=ClampMode.CLAMP) -> float:
    if cls.is_intra:
        return 0.57
    x = (frame_qp - 12) / 6.0
    if ClampMode.parse(mode) is ClampMode.LITERAL:
        return 0.68 * min(2.0, 4.0, x)
    return 0.68 * min(max(x, 2.0), 4.0)


def structure_factor_h(cls: GopFrameClass, mode=ClampMode.CLAMP) -> float:
    if not cls.referenced:
        return 1.0
    bf = cls.b_frame_count
    if ClampMode.parse(mode) is ClampMode.LITERAL:
        return 1.0 - min(0, 0.5, 0.005 * bf)
    return 1.0 - min(max(0.05 * bf, 0.0), 0.5)


def frame_qp(base_qp: int, cls: GopFrameClass) -> int:
    """Base QP plus the picture's hierarchy offset, kept inside [0, 51]."""
    return clip_qp(base_qp + cls.qp_offset)


def lagrange_multiplier(base_qp: int, cls: GopFrameClass = INTRA,
                        params: LambdaParams = LambdaParams()) -> float:
    qp = frame_qp(base_qp, cls)
    h = structure_factor_h(cls, params.clamp_mode)
    w = weight_wk(cls, qp, params.clamp_mode)
    return h * w * 2.0 ** ((qp - 12) / 3.0)


def round_half_away(v: float) -> int:
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def refined_qp(lambda_val: float, params: LambdaParams = LambdaParams()) -> int:
    """Lambda-refined QP: slope * ln(lambda) + intercept, rounded and clipped to [0, 51]."""
    if not lambda_val > 0:
        raise InvalidLambdaError(f"invalid lambda {lambda_val!r}: must be positive")
    return clip_qp(round_half_away(params.slope_p * math.log(lambda_val) + params.intercept_z))


# GOP structures. Position i of a GOP applies to display frame n >= 1 with
# (n - 1) % len(gop) == i; frame 0 is always intra.

def _ra8() -> tuple[GopFrameClass, ...]:
    bf = 7
    level = {8: 1, 4: 2, 2: 3, 6: 3, 1: 4, 3: 4, 5: 4, 7: 4}
    offset = {1: 1, 2: 2, 3: 3, 4: 3}
    return tuple(
        GopFrameClass("B", level[poc], offset[level[poc]], level[poc] < 4, bf)
        for poc in range(1, 9)
    )


GOP_PRESETS = {
    "ai": (INTRA,),
    "ra8": _ra8(),
}


@dataclass(frozen=True)
class GopStructure:
    name: str
    positions: tuple

    def frame_class(self, n: int) -> GopFrameClass:
        if n == 0:
            return INTRA
        return self.positions[(n - 1) % len(self.positions)]


def parse_gop_text(text: str, name: str = "file") -> GopStructure:
    """Parse a GOP table: one ``slice_type level qp_offset referenced`` row per position.

    Fields may be separated by whitespace or commas; ``#`` starts a comment.
    ``referenced`` accepts 1/0, yes/no, true/false, RP/NRP. The GOP-wide
    B-frame count is the GOP length minus one when any B row is present.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].replace(",", " ").split()
        if not line:
            continue
        if len(line) != 4:
            raise ValueError(f"GOP line {lineno}: expected 4 fields, got {len(line)}")
        st, level, off, ref = line
        flag = ref.lower()
        if flag in ("1", "yes", "true", "rp", "y"):
            referenced = True
        elif flag in ("0", "no", "false", "nrp", "n"):
            referenced = False
        else:
            raise ValueError(f"GOP line {lineno}: bad referenced flag {ref!r}")
        rows.append((st.upper(), int(level), int(off), referenced))
    if not rows:
        raise ValueError("GOP table has no rows")
    bf = len(rows) - 1 if any(r[0] == "B" for r in rows) else 0
    return GopStructure(name, tuple(
        GopFrameClass(st, lv, off, ref, bf if st == "B" else 0) for st, lv, off, ref in rows
    ))


def load_gop(spec: str) -> GopStructure:
    """Resolve ``ai``, ``ra8`` or ``file:PATH``."""
    if spec.startswith("file:"):
        path = Path(spec[5:])
        return parse_gop_text(path.read_text(), name=spec)
    try:
        return GopStructure(spec, GOP_PRESETS[spec])
    except KeyError:
        raise ValueError(f"unknown GOP preset {spec!r}; use ai, ra8 or file:PATH") from None


def format_gop(positions: Sequence[GopFrameClass]) -> str:
    return "".join(
        f"{c.slice_type} {c.hierarchy_level} {c.qp_offset} {int(c.referenced)}\n" for c in positions
    )
