import json

import pytest

from cubeshape.cli import cmd_dispatch


def run(capsys, *argv):
    code = cmd_dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_shape_pure_cubic(capsys):
    code, out, _ = run(capsys, "shape", "--form", "1,0,0,-2")
    data = json.loads(out)
    assert code == 0
    assert data["shape"] == [0.0, 1.2599210499] and data["tzf"] == [0, 1, 0]
    assert data["x_exact"] == "0" and data["boundary"] == "on_x_equals_0"


def test_pell(capsys):
    code, out, _ = run(capsys, "pell", "--disc", "60")
    data = json.loads(out)
    assert code == 0 and (data["U0"], data["W0"], data["eps0"]) == (8, 1, 7.8729833462)


def test_classes(capsys):
    code, out, _ = run(capsys, "classes", "--disc", "60")
    data = json.loads(out)
    assert code == 0 and data["count"] == 2
    assert {tuple(c["representative"]) for c in data["classes"]} == {(-1, 6, 6), (-2, 6, 3)}


def test_geodesic(capsys):
    code, out, _ = run(capsys, "geodesic", "--q=-1,6,6")
    data = json.loads(out)
    assert code == 0 and data["class_id"] == "D60#1" and data["normalized"] == [6, 18, 11]


@pytest.mark.parametrize(
    "argv",
    [
        ["shape", "--form", "1,0,0"],
        ["shape", "--form", "1,0,x,-2"],
        ["shape"],
        ["pell", "--disc", "60", "--bogus"],
        ["frobnicate"],
        ["enumerate", "--q", "1,8,1", "--xmax", "-5", "--out", "x.jsonl"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "usage error" in err


def test_literal_error_reports_position(capsys):
    _, _, err = run(capsys, "shape", "--form", "1,0,x,-2")
    assert "position" in err


@pytest.mark.parametrize("argv", [["pell", "--disc", "49"], ["classes", "--disc", "4"], ["shape", "--form", "1,0,0,0"]])
def test_domain_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err.startswith("error")


def test_pipeline(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    assert run(capsys, "enumerate", "--q", "1,8,1", "--xmax", "200000", "--out", str(a), "--threads", "2")[0] == 0
    b = tmp_path / "b.jsonl"
    assert run(capsys, "enumerate", "--q", "2,10,5", "--xmax", "2e5", "--maximal", "--unoriented", "--out", str(b))[0] == 0
    code, out, _ = run(capsys, "stats", "--in", str(a), "--window", "0:0.5", "--bins", "4", "--out", str(tmp_path / "h.csv"))
    assert code == 0 and json.loads(out.splitlines()[0])["class_id"] == "D60#1-"
    code, out, _ = run(capsys, "check", "--in", str(a), "--in", str(b))
    assert code == 0 and json.loads(out)["ok"]
    svg = tmp_path / "f.svg"
    code, out, _ = run(capsys, "plot", "--in", str(b), "--disc", "60", "--out", str(svg))
    assert code == 0 and svg.read_text().count('class="arc"') == 2
    first = svg.read_bytes()
    run(capsys, "plot", "--in", str(b), "--disc", "60", "--out", str(svg))
    assert svg.read_bytes() == first


def test_check_detects_corruption(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    run(capsys, "enumerate", "--q", "1,8,1", "--xmax", "100000", "--out", str(a))
    lines = a.read_text().splitlines()
    rec = json.loads(lines[0])
    rec["disc"] += 1
    lines[0] = json.dumps(rec)
    a.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "check", "--in", str(a))
    assert code == 1 and not json.loads(out)["ok"]


def test_missing_input_is_domain_error(tmp_path, capsys):
    code, _, _ = run(capsys, "check", "--in", str(tmp_path / "nope.jsonl"))
    assert code == 1
