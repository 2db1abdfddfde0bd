"""Line-oriented text serialisation of QP maps.

Layout (version 1)::

    cuqp-qpmap 1
    spec width=W height=H format=420 bitdepth=8
    analysis rule=acuq depth=D cu_size=S rows=R cols=C base_qp=QP aq_range=A \
        tp_rule=combined clamp_mode=clamp search_range=SR gop=ra8
    frames N
    frame index=n slice=B slice_qp=.. q=.. tp=.. mvm=.. sum_d=.. mean_qp=..
    qp <C integers>            (R lines)
    ratio <C reals>            (R lines)
    d <C integers>             (R lines)
    offset <C integers>        (R lines)
    mv <C dx,dy pairs>         (R lines)
    end
    ...

Reals use Python's shortest round-trip repr, so a document parses back to
bit-identical values. ``q=-`` marks an AdaptiveQP map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import MapFormatError
from .qp_synth import CuRecord, QpMap, Rule

MAGIC = "cuqp-qpmap"
VERSION = 1


@dataclass
class MapDocument:
    spec: dict
    analysis: dict
    maps: list


def _kv(fields: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in fields.items())


def _parse_kv(tokens: Sequence[str], lineno: int) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise MapFormatError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _chunks(seq, n):
    return [seq[i:i + n] for i in range(0, len(seq), n)]


def dump_maps(maps: Sequence[QpMap], spec: dict, analysis: dict) -> str:
    lines = [f"{MAGIC} {VERSION}", "spec " + _kv(spec), "analysis " + _kv(analysis),
             f"frames {len(maps)}"]
    for m in maps:
        _, cols = m.grid
        head = {
            "index": m.frame_index,
            "slice": m.slice_type,
            "slice_qp": m.slice_qp,
            "q": "-" if m.q is None else m.q,
            "tp": repr(float(m.t_p)),
            "mvm": repr(float(m.mvm)),
            "sum_d": m.sum_d,
            "mean_qp": repr(m.mean_qp),
        }
        lines.append("frame " + _kv(head))
        recs = m.intermediates
        columns = [
            ("qp", [str(v) for v in m.cu_qps]),
            ("ratio", [repr(float(r.ratio)) for r in recs]),
            ("d", [str(r.d) for r in recs]),
            ("offset", [str(r.offset) for r in recs]),
            ("mv", [f"{r.mv[0]},{r.mv[1]}" for r in recs]),
        ]
        for key, vals in columns:
            for row in _chunks(vals, cols):
                lines.append(key + " " + " ".join(row))
        lines.append("end")
    return "\n".join(lines) + "\n"


def loads(text: str) -> MapDocument:
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines or lines[0][1][:1] != [MAGIC]:
        raise MapFormatError("not a QP map document (missing header line)")
    try:
        version = int(lines[0][1][1])
    except (IndexError, ValueError):
        raise MapFormatError("line 1: missing version") from None
    if version != VERSION:
        raise MapFormatError(f"unsupported QP map version {version}")

    pos = 1
    sections = {}
    for key in ("spec", "analysis"):
        lineno, toks = lines[pos]
        if toks[0] != key:
            raise MapFormatError(f"line {lineno}: expected '{key}' line")
        sections[key] = _parse_kv(toks[1:], lineno)
        pos += 1
    lineno, toks = lines[pos]
    if toks[0] != "frames" or len(toks) != 2:
        raise MapFormatError(f"line {lineno}: expected 'frames N'")
    count = int(toks[1])
    pos += 1

    ana = sections["analysis"]
    try:
        rule = Rule.parse(ana["rule"])
        rows, cols = int(ana["rows"]), int(ana["cols"])
        cu_size = int(ana["cu_size"])
    except (KeyError, ValueError) as exc:
        raise MapFormatError(f"analysis line incomplete: {exc}") from None

    maps = []
    for _ in range(count):
        if pos >= len(lines):
            raise MapFormatError("document ends before all frames were read")
        lineno, toks = lines[pos]
        if toks[0] != "frame":
            raise MapFormatError(f"line {lineno}: expected 'frame' line")
        head = _parse_kv(toks[1:], lineno)
        pos += 1
        cols_data = {k: [] for k in ("qp", "ratio", "d", "offset", "mv")}
        while True:
            if pos >= len(lines):
                raise MapFormatError("frame block is missing its 'end' line")
            lineno, toks = lines[pos]
            pos += 1
            if toks[0] == "end":
                break
            if toks[0] not in cols_data:
                raise MapFormatError(f"line {lineno}: unknown row key {toks[0]!r}")
            if len(toks) - 1 != cols:
                raise MapFormatError(f"line {lineno}: expected {cols} values, got {len(toks) - 1}")
            cols_data[toks[0]].extend(toks[1:])
        for key, vals in cols_data.items():
            if len(vals) != rows * cols:
                raise MapFormatError(f"frame {head.get('index')}: '{key}' has {len(vals)} values, expected {rows * cols}")
        try:
            recs = tuple(
                CuRecord(float(r), int(d), int(head["q"]) if head["q"] != "-" else int(head["slice_qp"]),
                         int(o), tuple(int(c) for c in mv.split(",")))
                for r, d, o, mv in zip(cols_data["ratio"], cols_data["d"], cols_data["offset"], cols_data["mv"])
            )
            maps.append(QpMap(
                frame_index=int(head["index"]),
                rule=rule,
                cu_qps=tuple(int(v) for v in cols_data["qp"]),
                intermediates=recs,
                grid=(rows, cols),
                cu_size=cu_size,
                slice_type=head["slice"],
                slice_qp=int(head["slice_qp"]),
                q=None if head["q"] == "-" else int(head["q"]),
                t_p=float(head["tp"]),
                mvm=float(head["mvm"]),
            ))
        except (KeyError, ValueError) as exc:
            raise MapFormatError(f"frame {head.get('index')}: malformed values ({exc})") from None
    return MapDocument(sections["spec"], ana, maps)


def load(path) -> MapDocument:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())
