import json
import subprocess
import sys

import pytest

from equisep.cli import build_parser, main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    c10, c12, r40 = tmp_path / "c10.pts", tmp_path / "c12.pts", tmp_path / "r40.pts"
    assert run(["gen", "convex", "--n", 10, "-o", c10], capsys)[0] == 0
    assert run(["gen", "convex", "--n", 12, "-o", c12], capsys)[0] == 0
    assert run(["gen", "random", "--n", 40, "-o", r40], capsys)[0] == 0
    return tmp_path, c10, c12, r40


def test_spec_examples(files, capsys):
    d, c10, c12, _ = files
    code, out, _ = run(["con", c10, "-o", d / "hull.crv"], capsys)
    assert (code, out.strip()) == (0, "10")
    code, out, _ = run(["stab", "polygon", d / "hull.crv"], capsys)
    assert (code, out.strip()) == (0, "2")
    code, out, _ = run(["cut-exact", c12, "--k", 2, "-o", d / "w.arr"], capsys)
    assert (code, out.strip()) == (0, "3")
    assert (d / "w.arr").read_text().startswith("# equisep arrangement v1\nK 2\n")


def test_pipeline_of_commands(files, capsys):
    d, _, c12, r40 = files
    steps = [
        ["tree", r40, "-o", d / "t.json"],
        ["stab", "tree", r40, d / "t.json"],
        ["tour", r40, d / "t.json", "-o", d / "tour.crv"],
        ["uncross", r40, d / "tour.crv", "-o", d / "u.crv"],
        ["stab", "polygon", d / "u.crv"],
        ["partial-cut", r40, "--h", 4, "--l", 4, "-o", d / "pc.json"],
        ["cut-construct", r40, "--k", 4, "-o", d / "a.arr"],
        ["render", "-o", d / "s.svg", "--points", r40, "--cutting", d / "pc.json", "--curve", d / "u.crv", "--tree", d / "t.json"],
        ["render", "-o", d / "a.svg", "--points", r40, "--arrangement", d / "a.arr"],
        ["cut-report", c12, "--k", 2, "-o", d / "rep.csv"],
        ["survey", "--count", 2, "--n", 7, "--k", 2, "-o", d / "sv.csv"],
    ]
    for argv in steps:
        code, out, err = run(argv, capsys)
        assert code == 0, (argv, err)
    assert (d / "rep.svg").exists() and (d / "sv.svg").exists()


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.pts"
    bad.write_text("# equisep points v1\nN 1\n0 1 q\n")
    code, _, err = run(["con", bad], capsys)
    assert code == 2 and f"{bad}:3:5" in err
    with pytest.raises(SystemExit) as exc:
        main(["cut-exact"])
    assert exc.value.code == 2
    bow = tmp_path / "bow.crv"
    bow.write_text("# equisep curve v1\nV 4\n0 0 -\n2 2 -\n2 0 -\n0 2 -\n")
    code, _, err = run(["stab", "polygon", bow], capsys)
    assert code == 1
    record = json.loads(err.strip().splitlines()[-1])
    assert record["status"] == "failure" and record["command"] == "stab"


def test_fnd_verify_on_load(tmp_path, capsys):
    pts = tmp_path / "r.pts"
    run(["gen", "random", "--n", 200, "--seed", 3, "-o", pts], capsys)
    w = tmp_path / "w.json"
    assert run(["fnd", pts, "--n", 10, "--d", 8, "-o", w], capsys)[0] == 0
    assert run(["fnd", pts, "--n", 10, "--d", 8, "--verify", w], capsys)[0] == 0
    data = json.loads(w.read_text())
    data["subset_ids"] = data["subset_ids"][:-1]
    w.write_text(json.dumps(data))
    code, _, err = run(["fnd", pts, "--n", 10, "--d", 8, "--verify", w], capsys)
    assert code == 1 and "failure" in err


def test_seed_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EQUISEP_SEED", "11")
    assert build_parser().parse_args(["gen", "random"]).seed == 11
    a, b = tmp_path / "a.pts", tmp_path / "b.pts"
    run(["gen", "random", "--n", 5, "-o", a], capsys)
    monkeypatch.delenv("EQUISEP_SEED")
    run(["gen", "random", "--n", 5, "--seed", 11, "-o", b], capsys)
    assert a.read_text() == b.read_text()


def test_help_documents_every_command():
    text = subprocess.run([sys.executable, "-m", "equisep", "--help"], capture_output=True, text=True).stdout
    for cmd in ("gen", "con", "cut-exact", "cut-construct", "partial-cut", "stab", "tree", "tour", "uncross", "glue", "degree", "fnd", "cut-report", "survey", "render"):
        assert cmd in text
