"""Spatial activity of CUs and its normalisation against the picture average.

Per channel, the activity of a CU is one plus the smallest population
variance among its four sub-blocks. The normalised activity maps a CU
activity ``act`` and the picture mean ``tp`` to

    (s*act + tp) / (act + s*tp),   s = 2 ** (A / 6)

which lies in [1/s, s] and equals 1 for an average CU. The luma-only form
feeds AdaptiveQP; the summed Y+Cb+Cr form feeds ACUQ.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cu_grid import CuNode, Rect, SubBlockGeom
from .errors import EmptyBlockError, NoCusError
from .video_io import Frame


class TpRule(enum.Enum):
    LUMA = "luma"
    COMBINED = "combined"

    @classmethod
    def parse(cls, text) -> "TpRule":
        if isinstance(text, cls):
            return text
        aliases = {"luma": cls.LUMA, "luma_only": cls.LUMA, "combined": cls.COMBINED}
        try:
            return aliases[str(text)]
        except KeyError:
            raise ValueError(f"unknown t_p rule {text!r}") from None


@dataclass(frozen=True)
class QpAdaptConfig:
    adaptation_range_a: int = 6

    def __post_init__(self):
        if self.adaptation_range_a < 0:
            raise ValueError("adaptation range must be >= 0")

    @property
    def scale_s(self) -> float:
        return 2.0 ** (self.adaptation_range_a / 6)


@dataclass(frozen=True)
class CuActivity:
    y_act: float
    cb_act: Optional[float] = None
    cr_act: Optional[float] = None
    min_variances: dict = field(default_factory=dict, compare=False)

    @property
    def combined(self) -> float:
        """Y' + Cb' + Cr' (just Y' when there is no chroma)."""
        total = self.y_act
        if self.cb_act is not None:
            total += self.cb_act
        if self.cr_act is not None:
            total += self.cr_act
        return total

    def measure(self, rule: TpRule) -> float:
        return self.y_act if rule is TpRule.LUMA else self.combined


@dataclass(frozen=True)
class PictureActivity:
    t_p: float
    per_cu: tuple
    rule: TpRule = TpRule.COMBINED


def block_variance(plane: np.ndarray, rect: Rect) -> float:
    """Population variance of the samples of ``plane`` inside ``rect``."""
    x, y, w, h = rect
    if w <= 0 or h <= 0:
        raise EmptyBlockError(f"empty block {tuple(rect)}")
    if x < 0 or y < 0 or y + h > plane.shape[0] or x + w > plane.shape[1]:
        raise ValueError(f"block {tuple(rect)} lies outside a {plane.shape[1]}x{plane.shape[0]} plane")
    block = plane[y:y + h, x:x + w].astype(np.float64)
    dev = block - block.mean()
    return float(np.mean(dev * dev))


def cu_activity(frame: Frame, cu: CuNode, geoms: dict[str, SubBlockGeom]) -> CuActivity:
    acts = {}
    mins = {}
    for ch, geom in geoms.items():
        plane = frame.plane(ch)
        if plane is None:
            continue
        if not geom.rects:
            raise EmptyBlockError(f"empty block: no {ch} sub-block of CU at ({cu.x}, {cu.y}) survives clipping")
        v = min(block_variance(plane, r) for r in geom.rects)
        mins[ch] = v
        acts[ch] = 1.0 + v
    return CuActivity(acts["Y"], acts.get("Cb"), acts.get("Cr"), mins)


def picture_activity(activities: Sequence[CuActivity], rule=TpRule.COMBINED) -> PictureActivity:
    rule = TpRule.parse(rule)
    if not activities:
        raise NoCusError("no CUs: picture activity needs at least one CU")
    t_p = math.fsum(a.measure(rule) for a in activities) / len(activities)
    return PictureActivity(t_p, tuple(activities), rule)


def _normalise(act: float, t_p: float, s: float) -> float:
    return (s * act + t_p) / (act + s * t_p)


def normalized_activity_r(y_act: float, t_p: float, cfg: QpAdaptConfig = QpAdaptConfig()) -> float:
    """Luma-only normalised activity R."""
    return _normalise(y_act, t_p, cfg.scale_s)


def normalized_activity_x(y_act: float, cb_act: float, cr_act: float, t_p: float,
                          cfg: QpAdaptConfig = QpAdaptConfig()) -> float:
    """Luma+chroma normalised activity X; ``t_p`` should be the combined-rule mean."""
    return _normalise(y_act + cb_act + cr_act, t_p, cfg.scale_s)
