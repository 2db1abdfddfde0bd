"""PSNR per plane and Bjontegaard delta rate.

BD-Rate follows the classic cubic variant: fit log10(bitrate) as a cubic
polynomial of PSNR for each curve, integrate both fits over the shared PSNR
interval and convert the mean log-rate gap back to a percentage.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateCurveError, DisjointCurvesError, IncomparableError
from .video_io import Frame

COMPONENTS = ("Y", "Cb", "Cr")


def psnr(ref: Frame, dist: Frame, plane: str = "Y") -> float:
    """PSNR in dB of one plane; ``math.inf`` when the planes are identical."""
    if ref.spec != dist.spec:
        raise IncomparableError(f"incomparable frames: {ref.spec} vs {dist.spec}")
    a, b = ref.plane(plane), dist.plane(plane)
    if a is None:
        raise IncomparableError(f"incomparable frames: no {plane} plane in {ref.chroma_format.label}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    peak = float((1 << ref.bit_depth) - 1)
    return 10.0 * math.log10(peak * peak / mse)


@dataclass(frozen=True)
class RdPoint:
    bitrate: float  # kbps
    psnr: float  # dB

    def __post_init__(self):
        if not self.bitrate > 0:
            raise ValueError(f"bitrate must be positive, got {self.bitrate}")


@dataclass(frozen=True)
class RdCurve:
    points: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(
            p if isinstance(p, RdPoint) else RdPoint(*p) for p in self.points
        ))
        if len(self.points) < 4:
            raise ValueError(f"an RD curve needs at least 4 points, got {len(self.points)}")
        order = sorted(self.points, key=lambda p: p.bitrate)
        rates = [p.bitrate for p in order]
        quals = [p.psnr for p in order]
        if any(r1 >= r2 for r1, r2 in zip(rates, rates[1:])) or \
                any(q1 >= q2 for q1, q2 in zip(quals, quals[1:])):
            warnings.warn(f"non-monotone curve {self.label!r}", RuntimeWarning, stacklevel=3)

    @classmethod
    def from_arrays(cls, bitrates, psnrs, label: str = "") -> "RdCurve":
        return cls(tuple(RdPoint(float(r), float(q)) for r, q in zip(bitrates, psnrs)), label)

    @property
    def bitrates(self) -> np.ndarray:
        return np.array([p.bitrate for p in self.points], dtype=np.float64)

    @property
    def psnrs(self) -> np.ndarray:
        return np.array([p.psnr for p in self.points], dtype=np.float64)


def _fit(curve: RdCurve, norm: float) -> np.ndarray:
    q = curve.psnrs
    if len(np.unique(q)) < 4:
        raise DegenerateCurveError(f"degenerate curve {curve.label!r}: fewer than 4 distinct PSNR values")
    return np.polyfit(q, np.log10(curve.bitrates / norm), 3)


def bd_rate(anchor: RdCurve, test: RdCurve) -> float:
    """Average bitrate difference of ``test`` against ``anchor`` in percent (negative is better)."""
    # common normaliser keeps the fit well conditioned and cancels exactly for 2**k rescaling
    norm = float(np.max(anchor.bitrates))
    p_anchor = _fit(anchor, norm)
    p_test = _fit(test, norm)
    lo = max(anchor.psnrs.min(), test.psnrs.min())
    hi = min(anchor.psnrs.max(), test.psnrs.max())
    if not hi > lo:
        raise DisjointCurvesError(f"disjoint curves: PSNR ranges of {anchor.label!r} and {test.label!r} do not overlap")
    i_anchor = np.polyint(p_anchor)
    i_test = np.polyint(p_test)
    area = (np.polyval(i_test, hi) - np.polyval(i_test, lo)) - \
           (np.polyval(i_anchor, hi) - np.polyval(i_anchor, lo))
    return float((10.0 ** (area / (hi - lo)) - 1.0) * 100.0)


def read_rd_csv(path, label: Optional[str] = None) -> dict:
    """RD curves per component from a ``qp,bitrate_kbps,psnr_y,psnr_cb,psnr_cr`` CSV.

    Chroma columns may be absent or empty (4:0:0); such components are skipped.
    """
    label = label or str(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip() for f in reader.fieldnames or []]
        if "bitrate_kbps" not in fields or "psnr_y" not in fields:
            raise ValueError(f"{path}: header must include bitrate_kbps and psnr_y")
        rows = [{k.strip(): (v or "").strip() for k, v in row.items()} for row in reader]
    curves = {}
    for comp in COMPONENTS:
        col = "psnr_" + comp.lower()
        if col not in fields:
            continue
        vals = [r[col] for r in rows]
        if not any(vals) or any(v.upper() in ("", "N/A", "NA") for v in vals):
            continue
        curves[comp] = RdCurve.from_arrays([float(r["bitrate_kbps"]) for r in rows],
                                           [float(v) for v in vals], f"{label}:{comp}")
    return curves


def write_rd_csv(path, rows: Sequence[dict]) -> None:
    header = ["qp", "bitrate_kbps", "psnr_y", "psnr_cb", "psnr_cr"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header)
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k, "") for k in header})
