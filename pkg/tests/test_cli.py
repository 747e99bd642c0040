import csv
import io
import json
import math
import re
import subprocess
import sys

import pytest

from fencecut import cli
from fencecut import isoperimetrics as iso
from fencecut.cli import fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fmt_round_trips():
    for v in (1.0, 0.0, 0.1, math.pi, 1e-300, 2.5e17, 0.8862269254527579):
        assert float(fmt(v)) == v
    assert fmt(1.0) == "1"
    assert fmt(0.25) == "0.25"


def test_lstar_examples(capsys):
    code, out, _ = run(capsys, "lstar", "--x", "1", "--y", "2", "--area", "1")
    assert code == 0
    assert out.startswith("lstar=1 regime=straight-cut fence=straight-cut:")

    code, out, _ = run(capsys, "lstar", "--x", "1", "--y", "2", "--area", "0")
    assert code == 0 and out.startswith("lstar=0 ")

    code, out, _ = run(capsys, "lstar", "--x", "1", "--y", "2", "--area", "0.25")
    m = re.match(r"lstar=(\S+) regime=(\S+) fence=quarter-arc:corner=lower-left,radius=(\S+?),", out)
    assert code == 0 and m
    assert float(m.group(1)) == pytest.approx(0.8862269, abs=1e-7)
    assert m.group(2) == "quarter-disk"
    assert float(m.group(3)) == pytest.approx(0.5641896, abs=1e-7)


def test_lstar_json(capsys):
    code, out, _ = run(capsys, "lstar", "--x", "2", "--y", "1", "--area", "1.9", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["inputs"] == {"x": 1.0, "y": 2.0, "area": 1.9}
    assert doc["outputs"]["regime"] == "complement-quarter-disk"
    assert doc["outputs"]["lstar"] == iso.l_star(iso.Rect(1, 2), 1.9)


def test_exit_codes(capsys):
    code, _, err = run(capsys, "lstar", "--x", "1", "--y", "2", "--area", "3")
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "lstar", "--x", "-1", "--y", "2", "--area", "0")
    assert code == 1
    with pytest.raises(SystemExit) as exc:
        main(["lstar", "--x", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "oracle", "--cols", "5", "--rows", "5", "--k", "3")
    assert code == 1 and "anneal" in err


def test_curve_csv(capsys):
    code, out, _ = run(capsys, "curve", "--x", "1", "--y", "2", "--samples", "11")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["area", "lstar", "regime"]
    assert len(rows) == 13
    areas = [float(r["area"]) for r in rows]
    assert areas == sorted(areas)
    assert (areas[0], float(rows[0]["lstar"])) == (0.0, 0.0)
    assert (areas[-1], float(rows[-1]["lstar"])) == (2.0, 0.0)
    by_area = {float(r["area"]): r for r in rows}
    assert float(by_area[1.0]["lstar"]) == 1.0
    t = 1 / math.pi
    for a in (t, 2.0 - t):
        assert float(by_area[a]["lstar"]) == 1.0
        assert by_area[a]["regime"] == "straight-cut"
    for r in rows:
        a = float(r["area"])
        assert float(r["lstar"]) == iso.l_star(iso.Rect(1, 2), a)


def test_curve_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "curve", "--x", "1", "--y", "2", "--samples", "1")
    assert code == 1
    code, _, err = run(capsys, "curve", "--x", "1", "--y", "2", "--out", str(tmp_path / "no" / "f.csv"))
    assert code == 1 and "cannot write" in err


def test_curve_file_is_deterministic(capsys, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "curve", "--x", "1.5", "--y", "4", "--out", str(p1))[0] == 0
    assert run(capsys, "curve", "--x", "1.5", "--y", "4", "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    assert len(p1.read_text().splitlines()) == 1 + 101 + 2


def test_render_straight_cut(capsys):
    code, out, _ = run(capsys, "render", "--x", "1", "--y", "2", "--area", "1")
    assert code == 0
    assert 'viewBox="0 0 2 1"' in out
    paths = re.findall(r'<path d="([^"]+)"', out)
    assert paths == ["M 1 0 L 1 1"]
    xs = [float(v) for v in re.findall(r"[-\d.]+", paths[0])]
    assert math.hypot(xs[2] - xs[0], xs[3] - xs[1]) == 1.0
    assert "<rect" in out and "l* = 1</text>" in out


def test_render_empty_and_arc(capsys, tmp_path):
    _, out, _ = run(capsys, "render", "--x", "1", "--y", "2", "--area", "0")
    assert "<path" not in out and "<rect" in out
    target = tmp_path / "arc.svg"
    assert run(capsys, "render", "--x", "1", "--y", "2", "--area", "0.25", "--out", str(target))[0] == 0
    svg = target.read_text()
    (arc,) = re.findall(r'<path d="M 0 (\S+) A (\S+) (\S+) 0 0 0 (\S+) 0"', svg)
    assert all(float(v) == pytest.approx(0.5641896, abs=1e-7) for v in arc)
    assert "l* = 0.886227" in svg
    again = tmp_path / "arc2.svg"
    run(capsys, "render", "--x", "1", "--y", "2", "--area", "0.25", "--out", str(again))
    assert svg == again.read_text()


def test_oracle_and_anneal(capsys):
    code, out, _ = run(capsys, "oracle", "--cols", "3", "--rows", "4", "--k", "3")
    assert code == 0
    assert out.strip() == "min=3 lstar=3 witness=0,0;1,0;2,0"
    code, out, _ = run(capsys, "anneal", "--cols", "3", "--rows", "4", "--k", "3", "--seed", "5")
    assert code == 0 and out.startswith("min=3 lstar=3 cells=3")
    code, out, _ = run(capsys, "anneal", "--cols", "6", "--rows", "8", "--k", "20", "--json", "--init", "random")
    doc = json.loads(out)
    assert doc["seed"] == 0 and len(doc["outputs"]["witness"]) == 20
    assert doc["outputs"]["min"] >= doc["outputs"]["lstar"] - 1e-9


def test_optimize_command(capsys):
    code, out, _ = run(capsys, "optimize", "--x", "1", "--y", "2", "--area", "1", "--vertices", "8")
    m = re.match(r"length=(\S+) area=(\S+) lstar=1 converged=true iterations=\d+", out)
    assert code == 0 and m
    assert float(m.group(1)) == pytest.approx(1.0, rel=1e-6)
    code, _, err = run(capsys, "optimize", "--x", "1", "--y", "2", "--area", "2")
    assert code == 1 and "error" in err


def test_verify_passes_on_correct_build(capsys):
    code, out, _ = run(capsys, "verify", "--profile", "quick", "--seed", "7")
    assert code == 0
    assert out.strip().splitlines()[-1] == "13 passed, 0 failed"


def test_verify_fault_injection_names_dominance(capsys, monkeypatch):
    monkeypatch.setattr(cli.verify_mod.iso, "l_star", lambda rect, a: rect.x / 2)
    code, out, err = run(capsys, "verify", "--profile", "quick", "--seed", "7")
    assert code == 1
    assert "dominance" in err.split("failed checks:")[1]
    assert re.search(r"^FAIL dominance", out, re.M)


def test_verify_json_is_deterministic_without_timing():
    cmd = [sys.executable, "-m", "fencecut", "verify", "--profile", "quick", "--seed", "3", "--json", "--no-timing"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b
    assert "elapsed_s" not in a
    assert json.loads(a)["outputs"] == {"failed": 0, "passed": 13}
