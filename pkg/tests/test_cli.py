import numpy as np
import pytest

import expected
from cuqp import mapdoc
from cuqp.cli import heatmap_path, main
from cuqp.metrics import write_rd_csv
from cuqp.video_io import VideoSpec, write_video
from synth import make_frame, moving_square_clip, random_frame

RATES = [1200.0, 2300.0, 4700.0, 9800.0]
PSNRS = [32.1, 34.6, 37.0, 39.2]


def _gray_clip(tmp_path, n=3):
    spec = VideoSpec(128, 64, "420")
    path = tmp_path / "gray.yuv"
    write_video(path, [make_frame(spec, 128, index=i) for i in range(n)], spec)
    return path


def _analyze(tmp_path, clip, out_name, *extra, dims=(128, 64)):
    out = tmp_path / out_name
    rc = main(["analyze", "--input", str(clip), "--width", str(dims[0]), "--height", str(dims[1]),
               "--format", "420", "--qp", "32", "--out", str(out), *extra])
    assert rc == 0
    return out


def test_analyze_uniform_acuq(tmp_path, capsys):
    out = _analyze(tmp_path, _gray_clip(tmp_path), "a.qpm", "--rule", "acuq")
    doc = mapdoc.load(out)
    assert len(doc.maps) == 3
    for m in doc.maps:
        assert len(set(m.cu_qps)) == 1 and m.sum_d == 0
    summary = capsys.readouterr().out.splitlines()
    assert len(summary) == 3 and all("sum_d 0" in ln and "mean_qp" in ln for ln in summary)


def test_analyze_uniform_adaptiveqp(tmp_path):
    out = _analyze(tmp_path, _gray_clip(tmp_path), "b.qpm", "--rule", "adaptiveqp")
    for m in mapdoc.load(out).maps:
        assert set(m.cu_qps) == {m.slice_qp}
    assert [m.slice_qp for m in mapdoc.load(out).maps] == [32, 35, 35]


def test_analyze_moving_square(tmp_path):
    spec, frames, pos = moving_square_clip(n_frames=4)
    clip = tmp_path / "sq.yuv"
    write_video(clip, frames, spec)
    out = _analyze(tmp_path, clip, "sq.qpm", "--depth", "2", dims=(spec.width, spec.height))
    doc = mapdoc.load(out)
    for n, m in enumerate(doc.maps[1:], start=1):
        rows, cols = m.grid
        hit = set()
        for x0, y0 in (pos[n], pos[n - 1]):
            for r in range(rows):
                for c in range(cols):
                    if c * 16 < x0 + 32 and x0 < c * 16 + 16 and r * 16 < y0 + 32 and y0 < r * 16 + 16:
                        hit.add(r * cols + c)
        ds = [rec.d for rec in m.intermediates]
        assert sum(ds) >= 1
        assert {i for i, d in enumerate(ds) if d} <= hit


def test_analyze_stdout_document(tmp_path, capsys):
    clip = _gray_clip(tmp_path, 1)
    assert main(["analyze", "--input", str(clip), "--width", "128", "--height", "64", "--gop", "ai"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("cuqp-qpmap 1\n")
    assert cap.err.startswith("frame    0 I")


def test_analyze_deterministic_with_jobs(tmp_path, rng):
    spec = VideoSpec(96, 64, "420")
    clip = tmp_path / "r.yuv"
    write_video(clip, [random_frame(spec, rng, index=i) for i in range(4)], spec)
    a = _analyze(tmp_path, clip, "a.qpm", "--depth", "2", dims=(96, 64))
    b = _analyze(tmp_path, clip, "b.qpm", "--depth", "2", "--jobs", "3", dims=(96, 64))
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv,msg", [
    (["--width", "100", "--height", "64"], "short read"),
    (["--width", "128", "--height", "64", "--gop", "file:/nonexistent/gop.txt"], "error"),
])
def test_analyze_errors(tmp_path, capsys, argv, msg):
    clip = _gray_clip(tmp_path, 1)
    assert main(["analyze", "--input", str(clip), *argv]) == 1
    err = capsys.readouterr().err
    assert err.startswith("cuqp analyze: error:") and msg in err
    assert err.count("\n") == 1


def test_analyze_missing_input(tmp_path, capsys):
    assert main(["analyze", "--input", str(tmp_path / "none.yuv"), "--width", "64", "--height", "64"]) == 1
    assert "cuqp analyze: error:" in capsys.readouterr().err


def test_bad_qp_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--input", "x", "--width", "64", "--height", "64", "--qp", "60"])
    assert exc.value.code != 0


def test_compare(tmp_path, capsys):
    clip = _gray_clip(tmp_path)
    a = _analyze(tmp_path, clip, "a.qpm", "--rule", "adaptiveqp")
    b = _analyze(tmp_path, clip, "b.qpm", "--rule", "acuq")
    capsys.readouterr()
    assert main(["compare", str(a), str(a)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].startswith("overall mean_delta 0.0000 min 0 max 0")
    assert main(["compare", str(a), str(b), "--grid"]) == 0
    out = capsys.readouterr().out
    assert out.count("frame ") == 3 and "overall" in out


def test_compare_incomparable(tmp_path, capsys):
    clip = _gray_clip(tmp_path)
    a = _analyze(tmp_path, clip, "a.qpm")
    b = _analyze(tmp_path, clip, "b.qpm", "--depth", "1")
    capsys.readouterr()
    assert main(["compare", str(a), str(b)]) == 1
    assert "incomparable maps" in capsys.readouterr().err


def test_heatmap_command(tmp_path, capsys):
    a = _analyze(tmp_path, _gray_clip(tmp_path), "a.qpm", "--depth", "1")
    assert main(["heatmap", str(a), "--out", str(tmp_path / "h.pgm")]) == 0
    for n in range(3):
        data = (tmp_path / f"h_{n:04d}.pgm").read_bytes()
        assert data == b"P5\n4 2\n255\n" + bytes([128] * 8)
    assert main(["heatmap", str(a), "--out", str(tmp_path / "f{frame}.pgm")]) == 0
    assert (tmp_path / "f2.pgm").exists()


def test_heatmap_paths():
    assert heatmap_path("out.pgm", 3, False) == "out.pgm"
    assert heatmap_path("out.pgm", 3, True) == "out_0003.pgm"
    assert heatmap_path("d/{frame:03d}.pgm", 3, True) == "d/003.pgm"


def test_heatmap_unwritable(tmp_path, capsys):
    a = _analyze(tmp_path, _gray_clip(tmp_path, 1), "a.qpm")
    assert main(["heatmap", str(a), "--out", str(tmp_path / "missing" / "h.pgm")]) == 1
    assert "cuqp heatmap: error:" in capsys.readouterr().err


def _rd(path, rates, psnrs):
    write_rd_csv(path, [{"qp": qp, "bitrate_kbps": r, "psnr_y": p, "psnr_cb": p + 2, "psnr_cr": p + 3}
                        for qp, r, p in zip((37, 32, 27, 22), rates, psnrs)])


def test_bdrate_command(tmp_path, capsys):
    _rd(tmp_path / "a.csv", RATES, PSNRS)
    _rd(tmp_path / "t.csv", [0.9 * r for r in RATES], PSNRS)
    out = tmp_path / "bd.txt"
    assert main(["bdrate", str(tmp_path / "a.csv"), str(tmp_path / "t.csv"), "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["BD-Rate Y  -10.0000 %", "BD-Rate Cb -10.0000 %", "BD-Rate Cr -10.0000 %"]
    vals = dict(ln.split() for ln in out.read_text().splitlines())
    assert abs(float(vals["bd_rate_y"]) + 10) < 1e-6


def test_bdrate_disjoint(tmp_path, capsys):
    _rd(tmp_path / "a.csv", RATES, PSNRS)
    _rd(tmp_path / "t.csv", RATES, [p + 30 for p in PSNRS])
    assert main(["bdrate", str(tmp_path / "a.csv"), str(tmp_path / "t.csv")]) == 1
    assert "disjoint" in capsys.readouterr().err


def test_psnr_command(tmp_path, capsys):
    spec = VideoSpec(32, 32, "420")
    write_video(tmp_path / "a.yuv", [make_frame(spec, 100, index=i) for i in range(2)], spec)
    write_video(tmp_path / "b.yuv", [make_frame(spec, 101, 128, 128, index=i) for i in range(2)], spec)
    assert main(["psnr", str(tmp_path / "a.yuv"), str(tmp_path / "b.yuv"), "--width", "32", "--height", "32"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["frame", "Y", "Cb", "Cr"]
    assert len(lines) == 4
    y = float(lines[1].split()[1])
    assert y == pytest.approx(expected.PSNR_8BIT_MSE1, abs=1e-4)
    assert lines[1].split()[2:] == ["inf", "inf"]
    assert lines[3].split()[0] == "mean"


def test_psnr_frame_count_mismatch(tmp_path, capsys):
    spec = VideoSpec(32, 32, "400")
    write_video(tmp_path / "a.yuv", [make_frame(spec, 1)], spec)
    write_video(tmp_path / "b.yuv", [make_frame(spec, 1)] * 2, spec)
    rc = main(["psnr", str(tmp_path / "a.yuv"), str(tmp_path / "b.yuv"), "--width", "32", "--height", "32",
               "--format", "400"])
    assert rc == 1 and "incomparable frames" in capsys.readouterr().err


def test_psnr_sample_out_of_range(tmp_path, capsys):
    spec = VideoSpec(16, 16, "400", 10)
    raw = np.full(256, 2000, dtype="<u2").tobytes()
    (tmp_path / "a.yuv").write_bytes(raw)
    rc = main(["psnr", str(tmp_path / "a.yuv"), str(tmp_path / "a.yuv"), "--width", "16", "--height", "16",
               "--format", "400", "--bitdepth", "10"])
    assert rc == 1 and "sample out of range" in capsys.readouterr().err
