"""Golden-file tests for every CLI verb.

Set UPDATE_GOLDEN=1 to rewrite the golden files after an intended change.
"""

import json
import os
import subprocess
import sys

import pytest

from conftest import DATA, GOLDEN

CASES = [
    # name, argv, exit code
    ("enumerate_text", ["enumerate", "--max-order", "10"], 0),
    ("enumerate_json", ["enumerate", "--max-order", "10", "--format", "json"], 0),
    ("enumerate_partial", ["enumerate", "--max-order", "12", "--max-schemes", "50"], 2),
    ("verify_table_ok", ["verify-table", "--input", "t2_minimex.json"], 0),
    ("verify_table_broken", ["verify-table", "--input", "t2_broken.json", "--format", "json"], 1),
    ("is_quotient_t2", ["is-quotient", "--input", "t2.json"], 0),
    ("is_quotient_r8_json", ["is-quotient", "--input", "r8", "--format", "json"], 0),
    ("is_quotient_unreduced", ["is-quotient", "--input", "z2z2.json"], 1),
    ("reduce", ["reduce", "--input", "z2z2.json"], 0),
    ("tame_r8", ["tame", "--base", "r8", "--steps", "1"], 0),
    ("tame_file", ["tame", "--base", "t2.json", "--steps", "2", "--format", "json"], 0),
    ("classify_r8", ["classify", "--input", "r8.json"], 0),
    ("classify_t3_json", ["classify", "--input", "t3", "--format", "json"], 0),
    ("realize", ["realize", "--input", "t2_minimex.json"], 0),
    ("outcome_misere", ["outcome", "--misere", "--position", "2*g1+g2", "--games", "t2_games.json"], 0),
    ("outcome_normal", ["outcome", "--normal", "--position", "2*g1+g2", "--games", "t2_games.json"], 0),
    ("grundy", ["grundy", "--code", "0.77", "--to", "40"], 0),
    ("grundy_json", ["grundy", "--code", "0.77", "--to", "12", "--format", "json"], 0),
    ("almost_tame", ["almost-tame", "--code", "0.31", "--n0", "2", "--quotient", "t2.json", "--phi", "phi_031.json"], 0),
    ("almost_tame_fail", ["almost-tame", "--code", "0.31", "--n0", "1", "--quotient", "t2.json", "--phi", "phi_031.json"], 1),
    ("iso_yes", ["iso", "t2.json", "t2"], 0),
    ("iso_no", ["iso", "r8.json", "t3", "--format", "json"], 1),
]


def run(argv, cwd=DATA, env=None):
    full_env = dict(os.environ)
    full_env.pop("MISERE_JOBS", None)
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "misere", *argv], cwd=cwd, capture_output=True, text=True, env=full_env
    )


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code):
    res = run(argv)
    assert res.returncode == code, res.stderr
    path = os.path.join(GOLDEN, name + ".out")
    if os.environ.get("UPDATE_GOLDEN"):
        with open(path, "w") as fh:
            fh.write(res.stdout)
    with open(path) as fh:
        assert res.stdout == fh.read()


def test_enumerate_summary_line():
    res = run(["enumerate", "--max-order", "12"])
    assert res.returncode == 0
    assert "order 12: 6 classes" in res.stdout.splitlines()


def test_classify_r8_line():
    assert run(["classify", "--input", "r8.json"]).stdout == "R family, n=2 (order 8)\n"


def test_json_identical_across_jobs(tmp_path):
    outs = []
    for jobs, env in (("1", {}), ("2", {}), (None, {"MISERE_JOBS": "3"})):
        out = tmp_path / f"census-{jobs}.json"
        argv = ["enumerate", "--max-order", "10", "--out", str(out)]
        if jobs:
            argv += ["--jobs", jobs]
        assert run(argv, env=env).returncode == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    obj = json.loads(outs[0])
    assert obj["counts"]["10"] == 1 and obj["classes"]["10"][0]["key"]


def test_out_file_matches_stdout(tmp_path):
    out = tmp_path / "r12.json"
    assert run(["tame", "--base", "r8", "--steps", "1", "--out", str(out)]).returncode == 0
    assert out.read_text() == run(["tame", "--base", "r8", "--steps", "1"]).stdout
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp")]


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--max-order", "zero"],
        ["enumerate", "--max-order", "16"],
        ["bogus"],
        ["tame", "--base", "r8", "--steps", "1", "--frob"],
        ["grundy", "--code", "77", "--to", "5"],
        ["tame", "--base", "r10", "--steps", "1"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(argv).returncode == 64


def test_help_exits_zero():
    for verb in ("enumerate", "verify-table", "is-quotient", "reduce", "tame", "classify",
                 "realize", "outcome", "grundy", "almost-tame", "iso"):
        res = run([verb, "--help"])
        assert res.returncode == 0 and "usage" in res.stdout


def test_bad_input_data(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["classify", "--input", str(bad)]).returncode == 65
    notmonoid = tmp_path / "nm.json"
    notmonoid.write_text(json.dumps({"size": 2, "identity": 0, "table": [[0, 1], [1, 1]], "P": [], "generators": []}).replace("[[0, 1], [1, 1]]", "[[0, 1], [0, 1]]"))
    assert run(["classify", "--input", str(notmonoid)]).returncode == 65
    assert run(["classify", "--input", str(tmp_path / "missing.json")]).returncode == 65
    assert run(["realize", "--input", "t2_broken.json"]).returncode == 65
    assert run(["outcome", "--position", "g99", "--games", "t2_games.json"]).returncode == 65
