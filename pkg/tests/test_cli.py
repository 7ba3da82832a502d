"""CLI behaviour and golden --json outputs.

Set POLYRES_UPDATE_GOLDEN=1 to rewrite the golden files after an intended
change of output.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from polyres.cli import main, run

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
UPDATE = os.environ.get("POLYRES_UPDATE_GOLDEN") == "1"

BUILTINS = {
    "as": ("as", {"nf": "a.a.a.a", "eq": ("a.a.a", "a.a"), "dim": 5}),
    "epi4": ("epi:4", {"nf": "s_0^(3).s_0^(2).s_0^(1)", "eq": ("s_0^(2).s_0^(1)", "s_1^(2).s_0^(1)"), "dim": 4}),
    "z2": (f"monoid:{DATA / 'z2.json'}", {"nf": "a.a.a", "eq": ("a.a", "1@x"), "dim": 4}),
    "lz": (f"monoid:{DATA / 'lz.json'}", {"nf": "a.b.a", "eq": ("a.b", "b"), "dim": 4}),
}


def _invoke(argv):
    code, out, err = run([str(a) for a in argv])
    return code, out, err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("builtins")
    out = {}
    for name, (kind, _) in BUILTINS.items():
        path = root / f"{name}.json"
        code, _, err = _invoke(["builtin", kind, "-o", path])
        assert code == 0, err
        out[name] = path
    return out


def _commands(name, path):
    opts = BUILTINS[name][1]
    w1, w2 = opts["eq"]
    return {
        "builtin": ["builtin", BUILTINS[name][0]],
        "validate": ["validate", path],
        "nf-right": ["nf", path, opts["nf"], "--side", "right", "--trace"],
        "nf-left": ["nf", path, opts["nf"], "--side", "left", "--trace"],
        "eq": ["eq", path, w1, w2],
        "check": ["check", path],
        "reduce": ["reduce", path],
        "branchings-2": ["branchings", path, "--order", 2],
        "branchings-3": ["branchings", path, "--order", 3],
        "resolve": ["resolve", path, "--dim", 4],
        "syzygies": ["syzygies", path, "--dim", 2],
        "verify": ["verify", path, "--dim", opts["dim"], "--context-len", 2],
    }


CASES = [(b, c) for b in BUILTINS for c in _commands(b, "F")]


@pytest.mark.parametrize("builtin,command", CASES)
def test_golden_json(files, builtin, command):
    argv = _commands(builtin, files[builtin])[command] + ["--json"]
    code, out, err = _invoke(argv)
    assert code == 0, err
    again = _invoke(argv)[1]
    assert out == again, "--json output is not deterministic"
    golden = GOLDEN / f"{builtin}__{command}.json"
    if UPDATE or not golden.exists():
        golden.write_text(out, encoding="utf-8")
        if not UPDATE:
            pytest.fail(f"golden file {golden.name} was missing and has been written")
    assert out == golden.read_text(encoding="utf-8")
    json.loads(out)


def test_nf_text(files):
    code, out, _ = _invoke(["nf", files["as"], "a.a.a", "--side", "right", "--trace"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "a"
    assert len(lines) == 3


def test_eq_identities(files):
    code, out, _ = _invoke(["eq", files["as"], "1@x", "1@x"])
    assert (code, out) == (0, "true\n")
    code, out, _ = _invoke(["eq", files["as"], "a", "1@x"])
    assert (code, out) == (1, "false\n")


def test_syzygies_text(files):
    code, out, _ = _invoke(["syzygies", files["as"], "--dim", "2"])
    assert code == 0
    assert out == "δ[ω(mu@0;mu@1)] = [mu]a - a[mu]\n"
    code, out, _ = _invoke(["syzygies", files["as"], "--dim", "2", "--json"])
    (gen,) = json.loads(out)["generators"]
    assert gen["text"] == "[mu]a - a[mu]"


def test_exit_codes(files, tmp_path):
    assert _invoke(["check", DATA / "not_confluent.json"])[0] == 1
    assert _invoke(["resolve", DATA / "not_confluent.json", "--dim", 3])[0] == 1
    assert _invoke(["resolve", DATA / "redundant.json", "--dim", 3])[0] == 1
    assert _invoke(["validate", DATA / "bad_endpoints.json"])[0] == 1
    assert _invoke(["nf", DATA / "bad_endpoints.json", "a"])[0] == 2
    assert _invoke(["nf", files["as"], "b"])[0] == 2
    assert _invoke(["nf", tmp_path / "missing.json", "a"])[0] == 2
    assert _invoke(["builtin", "epi:1"])[0] == 2
    assert _invoke(["builtin", "nope"])[0] == 2
    assert _invoke(["syzygies", files["as"], "--dim", 1])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert _invoke(["check", bad])[0] == 2
    code, _, err = _invoke(["frobnicate"])
    assert code == 2 and err.count("\n") == 1


def test_reduce_writes_file(tmp_path):
    out = tmp_path / "reduced.json"
    code, text, _ = _invoke(["reduce", DATA / "redundant.json", "-o", out])
    assert code == 0 and "dropped r2" in text
    data = json.loads(out.read_text(encoding="utf-8"))
    assert [r["name"] for r in data["rules"]] == ["r1"]
    assert _invoke(["resolve", out, "--dim", 3])[0] == 0


def test_jobs_flag(files):
    code, out, _ = _invoke(["verify", files["epi4"], "--dim", 4, "--jobs", 2, "--json"])
    assert code == 0 and json.loads(out)["passed"]


def test_step_budget_env(tmp_path, monkeypatch):
    path = tmp_path / "grow.json"
    path.write_text(json.dumps({
        "objects": ["x"],
        "generators": [{"name": "a", "src": "x", "tgt": "x"}],
        "rules": [{"name": "g", "lhs": ["a"], "lhs_start": "x", "rhs": ["a", "a"], "rhs_start": "x"}],
        "termination": {"method": "assume"},
    }), encoding="utf-8")
    monkeypatch.setenv("POLYRES_STEP_BUDGET", "20")
    code, _, err = _invoke(["nf", path, "a"])
    assert code == 1 and "StepBudgetExceeded" in err


def test_main_and_module_entry(files, capsys):
    assert main(["eq", str(files["as"]), "a", "a.a"]) == 0
    assert capsys.readouterr().out == "true\n"
    proc = subprocess.run([sys.executable, "-m", "polyres.cli", "check", str(files["as"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "convergent: yes" in proc.stdout
