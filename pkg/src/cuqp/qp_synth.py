"""Per-CU QP maps under the AdaptiveQP and ACUQ rules.

AdaptiveQP:  Q  = slice_qp + ceil(6 * log2(R))
ACUQ:        Q~ = (D + q)  + ceil(6 * log2(X))     (R instead of X for 4:0:0)

R is the luma-only normalised activity, X the luma+chroma one, D the
temporal increment and q the lambda-refined frame QP. Final values are
clipped to [0, 51].
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import activity as act_mod
from .activity import QpAdaptConfig, TpRule
from .cu_grid import enumerate_cus, grid_shape, sub_blocks
from .errors import IncomparableError, SpecMismatchError
from .motion import DEFAULT_SEARCH_RANGE, motion_field, temporal_increment
from .rate_model import (INTRA, GopFrameClass, LambdaParams, clip_qp, frame_qp,
                         lagrange_multiplier, refined_qp)
from .video_io import ChromaFormat, Frame, check_frame

_SNAP_EPS = 1e-9


class Rule(enum.Enum):
    ADAPTIVE_QP = "adaptiveqp"
    ACUQ = "acuq"

    @classmethod
    def parse(cls, text) -> "Rule":
        if isinstance(text, cls):
            return text
        key = str(text).lower().replace("_", "")
        for r in cls:
            if r.value == key:
                return r
        raise ValueError(f"unknown rule {text!r}; use adaptiveqp or acuq")


def spatial_offset(ratio: float) -> int:
    """ceil(6 * log2(ratio)), snapping values within 1e-9 of an integer first."""
    v = 6.0 * math.log2(ratio)
    nearest = round(v)
    if abs(v - nearest) <= _SNAP_EPS:
        return int(nearest)
    return math.ceil(v)


def adaptive_qp_cu(slice_qp: int, r: float, cfg: QpAdaptConfig = QpAdaptConfig()) -> int:
    return clip_qp(slice_qp + spatial_offset(r))


def acuq_cu(d: int, q: int, x_or_r: float, chroma_format=ChromaFormat.YUV420,
            cfg: QpAdaptConfig = QpAdaptConfig()) -> int:
    """ACUQ QP of one CU. Pass X for formats with chroma and R for 4:0:0."""
    if d not in (0, 1):
        raise ValueError(f"temporal increment must be 0 or 1, got {d}")
    return clip_qp(d + q + spatial_offset(x_or_r))


@dataclass(frozen=True)
class CuRecord:
    """Intermediate values behind one CU's QP."""

    ratio: float  # R or X
    d: int
    base: int  # q for ACUQ, slice QP for AdaptiveQP
    offset: int  # ceil(6*log2(ratio)) before clipping
    mv: tuple = (0, 0)


@dataclass(frozen=True)
class QpMap:
    frame_index: int
    rule: Rule
    cu_qps: tuple
    intermediates: tuple
    grid: tuple  # (rows, cols)
    cu_size: int
    slice_type: str = "I"
    slice_qp: int = 0
    q: Optional[int] = None
    t_p: float = 1.0
    mvm: float = 0.0

    @property
    def sum_d(self) -> int:
        return sum(r.d for r in self.intermediates)

    @property
    def mean_qp(self) -> float:
        return math.fsum(self.cu_qps) / len(self.cu_qps)

    def rows(self) -> list[tuple]:
        _, cols = self.grid
        return [self.cu_qps[i:i + cols] for i in range(0, len(self.cu_qps), cols)]


@dataclass(frozen=True)
class AnalysisConfig:
    rule: Rule = Rule.ACUQ
    depth: int = 0
    aq: QpAdaptConfig = field(default_factory=QpAdaptConfig)
    lam: LambdaParams = field(default_factory=LambdaParams)
    tp_rule: TpRule = TpRule.COMBINED
    search_range: int = DEFAULT_SEARCH_RANGE

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule.parse(self.rule))
        object.__setattr__(self, "tp_rule", TpRule.parse(self.tp_rule))


def build_qp_map(frame: Frame, prev: Optional[Frame], base_qp: int,
                 gop_class: GopFrameClass = INTRA,
                 config: AnalysisConfig = AnalysisConfig()) -> QpMap:
    if not 0 <= base_qp <= 51:
        raise ValueError(f"base QP must be in [0, 51], got {base_qp}")
    spec = frame.spec
    if prev is not None:
        try:
            check_frame(prev, spec)
        except SpecMismatchError as exc:
            raise SpecMismatchError(f"spec mismatch between frame and its reference: {exc}") from None

    cus = enumerate_cus(spec, config.depth)
    acts = [act_mod.cu_activity(frame, cu, sub_blocks(cu, spec)) for cu in cus]
    chroma = spec.chroma_format.has_chroma
    slice_qp = frame_qp(base_qp, gop_class)
    rows_cols = grid_shape(spec, config.depth)
    aq = config.aq

    if config.rule is Rule.ADAPTIVE_QP:
        pic = act_mod.picture_activity(acts, TpRule.LUMA)
        qps, recs = [], []
        for a in acts:
            r = act_mod.normalized_activity_r(a.y_act, pic.t_p, aq)
            recs.append(CuRecord(r, 0, slice_qp, spatial_offset(r)))
            qps.append(adaptive_qp_cu(slice_qp, r, aq))
        return QpMap(frame.index, config.rule, tuple(qps), tuple(recs), rows_cols,
                     cus[0].size_2n, gop_class.slice_type, slice_qp, None, pic.t_p, 0.0)

    pic = act_mod.picture_activity(acts, config.tp_rule if chroma else TpRule.LUMA)
    ref = None if gop_class.is_intra else prev
    mf = motion_field(frame, ref, cus, config.search_range)
    q = refined_qp(lagrange_multiplier(base_qp, gop_class, config.lam), config.lam)
    qps, recs = [], []
    for a, m, mv in zip(acts, mf.magnitudes, mf.vectors):
        if chroma:
            ratio = act_mod.normalized_activity_x(a.y_act, a.cb_act, a.cr_act, pic.t_p, aq)
        else:
            ratio = act_mod.normalized_activity_r(a.y_act, pic.t_p, aq)
        d = temporal_increment(m, mf.mvm)
        recs.append(CuRecord(ratio, d, q, spatial_offset(ratio), tuple(mv)))
        qps.append(acuq_cu(d, q, ratio, spec.chroma_format, aq))
    return QpMap(frame.index, config.rule, tuple(qps), tuple(recs), rows_cols,
                 cus[0].size_2n, gop_class.slice_type, slice_qp, q, pic.t_p, mf.mvm)


@dataclass(frozen=True)
class MapComparison:
    deltas: tuple  # b - a per CU, raster order
    grid: tuple
    mean: float
    min: int
    max: int
    histogram: dict

    def delta_rows(self) -> list[tuple]:
        _, cols = self.grid
        return [self.deltas[i:i + cols] for i in range(0, len(self.deltas), cols)]


def compare_maps(a: QpMap, b: QpMap) -> MapComparison:
    if a.grid != b.grid or len(a.cu_qps) != len(b.cu_qps):
        raise IncomparableError(f"incomparable maps: grids {a.grid} and {b.grid}")
    deltas = tuple(qb - qa for qa, qb in zip(a.cu_qps, b.cu_qps))
    hist = dict(sorted(Counter(deltas).items()))
    return MapComparison(deltas, a.grid, math.fsum(deltas) / len(deltas),
                         min(deltas), max(deltas), hist)


def analyze_sequence(frames: Sequence[Frame], base_qp: int, gop, config: AnalysisConfig,
                     workers: int = 1) -> list[QpMap]:
    """QP maps for consecutive display-order frames; each frame's reference is its predecessor."""
    jobs = [(f, frames[i - 1] if i else None, gop.frame_class(f.index)) for i, f in enumerate(frames)]

    def run(job):
        f, prev, cls = job
        return build_qp_map(f, prev, base_qp, cls, config)

    if workers <= 1:
        return [run(j) for j in jobs]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))
