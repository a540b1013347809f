from __future__ import annotations

import json
import subprocess
import sys

import pytest

from coboundary.cli import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    REGISTRY,
    CheckConfig,
    dumps,
    main,
    run,
    run_suite,
)
from coboundary.hopf import catalog


def run_main(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_single_check_passes(capsys):
    code, out, err = run_main(capsys, "--check", "eq22", "--n", "2")
    assert code == EXIT_PASS
    doc = json.loads(out)
    assert [c["check"] for c in doc["checks"]] == ["eq22"]
    assert doc["checks"][0]["status"] == "pass"
    assert "1/1 passed" in err


def test_planted_failure_in_suite(capsys):
    code, out, _ = run_main(capsys, "--suite", "eq22,qybe", "--n", "2", "--g0", "identity")
    assert code == EXIT_FAIL
    statuses = {c["check"]: c["status"] for c in json.loads(out)["checks"]}
    assert statuses == {"eq22": "fail", "qybe": "pass"}


def test_failure_carries_witness(capsys):
    _, out, _ = run_main(capsys, "--check", "eq22", "--g0", "identity")
    rep = json.loads(out)["checks"][0]
    assert rep["witness"]


@pytest.mark.parametrize("argv", [
    ["--check", "qybe", "--n", "1"],
    ["--check", "no-such-check"],
    ["--check", "eq22", "--n", "7"],
    ["--check", "gauge-quantum", "--max-degree", "0"],
    ["--check", "jacobi", "--samples", "0"],
    ["--check", "eq22", "--suite", "all"],
    ["--check", "hopf-chain", "--algebra", "nonsense"],
    ["--n", "2"],
    ["--bogus"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run_main(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_empty_suite(capsys):
    code, out, err = run_main(capsys, "--suite", "")
    assert code == EXIT_PASS
    assert json.loads(out)["checks"] == []
    assert "no checks run" in err


def test_list(capsys):
    code, out, _ = run_main(capsys, "--list")
    assert code == EXIT_PASS
    for name in REGISTRY:
        assert name in out


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run_main(capsys, "--check", "volume-element", "--n", "3", "--out", str(target))
    assert code == EXIT_PASS and out == ""
    doc = json.loads(target.read_text())
    assert doc["checks"][0]["params"]["n"] == 3


def test_config_file_and_override(capsys, tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"check": ["multiplicativity"], "n": 3, "seed": 11, "samples": 2}))
    _, out, _ = run_main(capsys, "--config", str(conf))
    params = json.loads(out)["checks"][0]["params"]
    assert (params["n"], params["seed"], params["samples"]) == (3, 11, 2)
    _, out, _ = run_main(capsys, "--config", str(conf), "--seed", "5", "--n", "2")
    doc = json.loads(out)
    assert doc["seed"] == 5
    assert doc["checks"][0]["params"]["n"] == 2


def test_config_rejects_unknown_keys(capsys, tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"check": "qybe", "colour": "blue"}))
    code, _, err = run_main(capsys, "--config", str(conf))
    assert code == EXIT_USAGE and "colour" in err


def test_env_seed_echoed(capsys, monkeypatch):
    monkeypatch.setenv("COBOUNDARY_SEED", "42")
    _, out, _ = run_main(capsys, "--check", "antipode", "--samples", "2")
    doc = json.loads(out)
    assert doc["seed"] == 42
    assert doc["checks"][0]["params"]["seed"] == 42
    # an explicit flag wins over the environment
    _, out, _ = run_main(capsys, "--check", "antipode", "--samples", "2", "--seed", "3")
    assert json.loads(out)["seed"] == 3


def test_same_seed_same_bytes(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    base = CheckConfig(check="", seed=9, samples=3)
    names = ["translation", "gauge-identity", "jacobi", "hopf-chain"]
    a = dumps(run_suite(names, base))
    b = dumps(run_suite(names, base))
    assert a == b
    assert json.loads(a)["timestamp"] == 1700000000


def test_parallel_matches_sequential():
    base = CheckConfig(check="", samples=2)
    names = ["qybe", "volume-element", "translation", "hopf-chain"]
    assert dumps(run_suite(names, base, jobs=1)) == dumps(run_suite(names, base, jobs=3))


def test_different_seed_changes_samples():
    a = run(CheckConfig(check="translation", seed=1, samples=2))
    b = run(CheckConfig(check="translation", seed=2, samples=2))
    assert a.params["seed"] != b.params["seed"]
    assert a.status == b.status == "pass"


def test_algebra_list_expands(capsys):
    _, out, _ = run_main(capsys, "--check", "hopf-chain", "--algebra", "Z2,sweedler")
    algebras = [c["params"]["algebra"] for c in json.loads(out)["checks"]]
    assert algebras == ["Z2", "sweedler"]


def test_algebra_from_file(capsys, tmp_path):
    path = tmp_path / "z3.json"
    path.write_text(json.dumps(catalog("Z3").to_json()))
    code, out, _ = run_main(capsys, "--check", "hopf-unitarity", "--algebra", str(path))
    assert code == EXIT_PASS
    rows = json.loads(out)["checks"][0]["details"]["members"]
    assert rows


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "coboundary", "--check", "qybe", "--n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["checks"][0]["status"] == "pass"
