import json
import subprocess
import sys

import pytest

from npcevents.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_period_doubling_lines(capsys):
    code, out, _ = run(capsys, "wise", "period-doubling", "12")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 12 and all(l.endswith("PASS") for l in lines)


def test_check_csc_bundled(capsys):
    code, out, _ = run(capsys, "check", "csc", "data/wise_x.sqc")
    assert code == 0 and out.strip() == "csc: PASS"


def test_check_fail_exit_code(capsys):
    code, out, _ = run(capsys, "check", "orientation", "mobius")
    assert code == 1 and "FAIL" in out


def test_mismatch_patch_unsat(capsys):
    code, out, _ = run(capsys, "tiles", "patch", "data/mismatch.tiles", "--w", "2", "--h", "1")
    assert code == 1 and out.strip() == "UNSAT"


def test_json_format_either_side(capsys):
    _, a, _ = run(capsys, "--format", "json", "check", "special", "torus")
    _, b, _ = run(capsys, "check", "special", "torus", "--format", "json")
    assert a == b and json.loads(a)["status"] == "PASS"


def test_usage_errors(capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "check", "npc", "no/such/file.sqc")[0] == 2
    assert run(capsys, "wise", "word", "3")[0] == 2
    assert run(capsys, "unfold", "torus", "--vertex", "v", "--radius", "-1")[0] == 2
    code, _, err = run(capsys, "unfold", "torus", "--vertex", "zz", "--radius", "1")
    assert code == 2 and "UnknownVertex" in err


def test_budget_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("WISE_BUDGET", "50")
    code, _, err = run(capsys, "unfold", "wise_x", "--vertex", "v", "--radius", "4")
    assert code == 2 and "ResourceLimit" in err
    monkeypatch.setenv("WISE_BUDGET", "lots")
    assert run(capsys, "unfold", "torus", "--vertex", "v", "--radius", "1")[0] == 2


def test_unfold_filter_events_pipeline(capsys, tmp_path):
    ball = tmp_path / "ball.json"
    code, out, _ = run(capsys, "unfold", "torus", "--vertex", "v", "--radius", "4", "--out", str(ball))
    assert code == 0 and "41 vertices" in out
    frag = tmp_path / "frag.json"
    code, out, _ = run(capsys, "filter", str(ball), "--vertex", "o", "--depth", "3", "--out", str(frag))
    assert code == 0 and "10 vertices" in out
    code, out, _ = run(capsys, "events", str(frag), "--natural", "--config-bound", "3")
    assert code == 0 and "events: PASS" in out
    code, out, _ = run(capsys, "--format", "dot", "events", str(frag))
    assert out.startswith("graph natural")
    lab = tmp_path / "lab.json"
    code, _, _ = run(capsys, "label", "search", str(frag), "--alphabet", "2", "--out", str(lab))
    assert code == 0
    code, out, _ = run(capsys, "label", "check", str(frag), "--labeling", str(lab))
    assert code == 0 and out.strip() == "nice: PASS"
    assert run(capsys, "label", "search", str(frag), "--alphabet", "1")[0] == 1


def test_label_trace(capsys):
    assert run(capsys, "label", "trace", "torus", "--radius", "3")[0] == 0
    code, out, _ = run(capsys, "label", "trace", "inter_osculation", "--radius", "3")
    assert code == 1 and "LES2" in out


def test_unfold_dot_and_csc_fast(capsys):
    code, out, _ = run(capsys, "--format", "dot", "unfold", "wise_x", "--vertex", "v", "--radius", "1")
    assert code == 0 and out.startswith("digraph")
    code, out, _ = run(capsys, "unfold", "wise_x", "--vertex", "v", "--radius", "2", "--csc-fast")
    assert "77 vertices" in out


def test_tiles_commands(capsys):
    assert run(capsys, "tiles", "check", "wise")[0] == 0
    code, out, _ = run(capsys, "tiles", "torus", "single", "--a", "1", "--b", "1")
    assert code == 0 and out.strip() == "T"
    code, out, _ = run(capsys, "tiles", "probe", "single", "--max-patch", "3", "--max-period", "2")
    assert "verdict: periodic" in out
    assert run(capsys, "tiles", "patch", "wise")[0] == 2


def test_wise_builders(capsys):
    code, out, _ = run(capsys, "wise", "build-x")
    assert code == 0 and out.count("square") == 6
    code, out, _ = run(capsys, "--format", "json", "wise", "build-w")
    d = json.loads(out)
    assert (len(d["vertices"]), len(d["edges"]), len(d["squares"])) == (27, 49, 24)
    code, out, _ = run(capsys, "wise", "word", "3", "5")
    assert out.strip() == "xxx"


def test_identical_invocations_identical_output(capsys):
    argv = ["--format", "json", "unfold", "wise_x", "--vertex", "v", "--radius", "2"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "npcevents", "wise", "word", "2", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "xy"
