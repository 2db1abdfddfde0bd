"""Command-line interface: ``cuqp {analyze,compare,heatmap,bdrate,psnr}``."""

from __future__ import annotations

import argparse
import math
import sys
from collections import Counter
from pathlib import Path

from . import mapdoc
from .activity import QpAdaptConfig, TpRule
from .errors import CuqpError
from .heatmap import heatmap_pixels, write_pgm
from .metrics import COMPONENTS, bd_rate, psnr, read_rd_csv
from .motion import DEFAULT_SEARCH_RANGE
from .qp_synth import AnalysisConfig, Rule, analyze_sequence, compare_maps
from .rate_model import LambdaParams, load_gop
from .video_io import ChromaFormat, VideoSpec, count_frames, iter_frames


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--format", choices=["444", "422", "420", "400"], default="420")
    p.add_argument("--bitdepth", type=int, choices=[8, 10], default=8)


def _spec_from(args) -> VideoSpec:
    return VideoSpec(args.width, args.height, ChromaFormat.parse(args.format), args.bitdepth)


def _qp(text: str) -> int:
    v = int(text)
    if not 0 <= v <= 51:
        raise argparse.ArgumentTypeError(f"QP must be in [0, 51], got {v}")
    return v


def _fmt_db(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.4f}"


def cmd_analyze(args) -> int:
    spec = _spec_from(args)
    spec = spec.with_frame_count(count_frames(args.input, spec))
    gop = load_gop(args.gop)
    config = AnalysisConfig(
        rule=Rule.parse(args.rule),
        depth=args.depth,
        aq=QpAdaptConfig(args.aq_range),
        lam=LambdaParams(clamp_mode=args.clamp_mode),
        tp_rule=TpRule.parse(args.tp_rule),
        search_range=args.search_range,
    )
    frames = list(iter_frames(args.input, spec))
    maps = analyze_sequence(frames, args.qp, gop, config, workers=args.jobs)
    spec_fields = {"width": spec.width, "height": spec.height,
                   "format": spec.chroma_format.value, "bitdepth": spec.bit_depth}
    rows, cols = maps[0].grid if maps else (0, 0)
    analysis = {
        "rule": config.rule.value, "depth": config.depth, "cu_size": 64 >> config.depth,
        "rows": rows, "cols": cols, "base_qp": args.qp,
        "aq_range": config.aq.adaptation_range_a, "tp_rule": config.tp_rule.value,
        "clamp_mode": config.lam.clamp_mode.value, "search_range": config.search_range,
        "gop": args.gop,
    }
    text = mapdoc.dump_maps(maps, spec_fields, analysis)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    out = sys.stdout if args.out else sys.stderr
    for m in maps:
        q = "-" if m.q is None else m.q
        print(f"frame {m.frame_index:4d} {m.slice_type} slice_qp {m.slice_qp} q {q} "
              f"mean_qp {m.mean_qp:.3f} sum_d {m.sum_d} mvm {m.mvm:.4f} tp {m.t_p:.4f}", file=out)
    return 0


def cmd_compare(args) -> int:
    a, b = mapdoc.load(args.map_a), mapdoc.load(args.map_b)
    if len(a.maps) != len(b.maps):
        raise CuqpError(f"incomparable maps: {len(a.maps)} vs {len(b.maps)} frames")
    all_deltas = []
    for ma, mb in zip(a.maps, b.maps):
        c = compare_maps(ma, mb)
        all_deltas.extend(c.deltas)
        hist = " ".join(f"{k:+d}:{v}" for k, v in c.histogram.items())
        print(f"frame {ma.frame_index} mean_delta {c.mean:.4f} min {c.min} max {c.max} hist {hist}")
        if args.grid:
            for row in c.delta_rows():
                print("  " + " ".join(f"{d:+d}" for d in row))
    if all_deltas:
        hist = " ".join(f"{k:+d}:{v}" for k, v in sorted(Counter(all_deltas).items()))
        print(f"overall mean_delta {math.fsum(all_deltas) / len(all_deltas):.4f} "
              f"min {min(all_deltas)} max {max(all_deltas)} hist {hist}")
    return 0


def heatmap_path(pattern: str, frame_index: int, many: bool) -> str:
    if "{" in pattern:
        return pattern.format(frame=frame_index)
    if not many:
        return pattern
    p = Path(pattern)
    return str(p.with_name(f"{p.stem}_{frame_index:04d}{p.suffix or '.pgm'}"))


def cmd_heatmap(args) -> int:
    doc = mapdoc.load(args.map)
    many = len(doc.maps) > 1
    for m in doc.maps:
        path = heatmap_path(args.out, m.frame_index, many)
        write_pgm(path, heatmap_pixels(m))
        print(path)
    return 0


def cmd_bdrate(args) -> int:
    anchor = read_rd_csv(args.anchor_csv, "anchor")
    test = read_rd_csv(args.test_csv, "test")
    lines = []
    for comp in COMPONENTS:
        if comp in anchor and comp in test:
            v = bd_rate(anchor[comp], test[comp])
            lines.append(f"bd_rate_{comp.lower()} {v:.6f}")
            print(f"BD-Rate {comp:<2} {v:+.4f} %")
        else:
            print(f"BD-Rate {comp:<2} N/A")
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="ascii")
    return 0


def cmd_psnr(args) -> int:
    spec = _spec_from(args)
    na, nb = count_frames(args.ref, spec), count_frames(args.dist, spec)
    if na != nb:
        raise CuqpError(f"incomparable frames: {na} reference vs {nb} distorted frames")
    planes = COMPONENTS if spec.chroma_format.has_chroma else ("Y",)
    print("frame " + " ".join(f"{p:>9}" for p in planes))
    sums = {p: [] for p in planes}
    for fa, fb in zip(iter_frames(args.ref, spec), iter_frames(args.dist, spec)):
        vals = {p: psnr(fa, fb, p) for p in planes}
        for p, v in vals.items():
            sums[p].append(v)
        print(f"{fa.index:5d} " + " ".join(f"{_fmt_db(vals[p]):>9}" for p in planes))
    if na:
        means = {p: math.fsum(v) / len(v) if not any(map(math.isinf, v)) else math.inf
                 for p, v in sums.items()}
        print("mean  " + " ".join(f"{_fmt_db(means[p]):>9}" for p in planes))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cuqp", description="CU-level adaptive QP analysis of raw YCbCr video")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute per-CU QP maps")
    p.add_argument("--input", required=True)
    _add_spec_flags(p)
    p.add_argument("--qp", type=_qp, default=32)
    p.add_argument("--rule", choices=["adaptiveqp", "acuq"], default="acuq")
    p.add_argument("--gop", default="ra8", help="ai, ra8 or file:PATH")
    p.add_argument("--depth", type=int, choices=[0, 1, 2], default=0)
    p.add_argument("--aq-range", type=int, default=6)
    p.add_argument("--search-range", type=int, default=DEFAULT_SEARCH_RANGE)
    p.add_argument("--clamp-mode", choices=["clamp", "literal"], default="clamp")
    p.add_argument("--tp-rule", choices=["luma", "combined"], default="combined")
    p.add_argument("--jobs", type=int, default=1, help="frames analysed concurrently")
    p.add_argument("--out", help="map document path (default: stdout, summary to stderr)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="per-CU deltas between two map documents (b - a)")
    p.add_argument("map_a")
    p.add_argument("map_b")
    p.add_argument("--grid", action="store_true", help="also print the delta grid")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("heatmap", help="write one PGM per frame")
    p.add_argument("map")
    p.add_argument("--out", required=True, help="output path; '{frame}' is replaced by the frame index")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("bdrate", help="BD-Rate of test against anchor RD CSVs")
    p.add_argument("anchor_csv")
    p.add_argument("test_csv")
    p.add_argument("--out", help="also write key/value results here")
    p.set_defaults(func=cmd_bdrate)

    p = sub.add_parser("psnr", help="per-frame, per-plane PSNR")
    p.add_argument("ref")
    p.add_argument("dist")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_psnr)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CuqpError, OSError, ValueError) as exc:
        print(f"cuqp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
