import io
import json
import math
from pathlib import Path

import pytest

from varlp.cli import JobSpec, dumps, main, run_job

GOLDEN = Path(__file__).parent / "golden"


def run(job, *flags, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(job)))
    code = main(list(flags))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_hand_example(monkeypatch, capsys):
    job = {"command": "norm", "inputs": {"exponents": [1, "inf"], "vector": [1, 1, 1]}}
    code, out, _ = run(job, monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["enclosure"]["lower"] == rep["result"]["enclosure"]["upper"] == 2.0
    assert rep["result"]["enclosure"]["exact"] is True


def test_embed_example(monkeypatch, capsys):
    job = {
        "command": "embed",
        "inputs": {"target": {"prefix": [2] * 4, "tail": {"kind": "constant", "value": 2}}, "host": {"prefix": [], "tail": {"kind": "enumerated", "name": "universal-rationals"}}},
        "params": {"samples": 20},
    }
    code, out, _ = run(job, "--epsilon", "0.1", monkeypatch=monkeypatch, capsys=capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert res["forward_bound"] <= 1.1 and res["backward_bound"] <= 1.1
    assert res["distortion"]["respects_bounds"]


def test_classify_example(monkeypatch, capsys):
    job = json.loads((GOLDEN / "classify.job.json").read_text())
    code, out, _ = run(job, monkeypatch=monkeypatch, capsys=capsys)
    res = json.loads(out)["result"]
    assert res["verdict"] == "NonReflexive" and "l1" in res["sides"]


def test_check_violation_exit_code(monkeypatch, capsys):
    job = {
        "command": "check",
        "inputs": {"exponents": 1, "family": [{"support": [[1, 1.0]]}, {"support": [[2, 1.0]]}]},
        "params": {"kind": "upper", "exponent": 2},
    }
    code, out, _ = run(job, monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 3 and rep["status"] == "violated"
    assert rep["result"]["worst"]["margin"] < 0 and rep["result"]["worst"]["counterexample"]


def test_check_defaults_to_evidence(monkeypatch, capsys):
    universal = {"prefix": [], "tail": {"kind": "enumerated", "name": "universal-rationals"}}
    clamped = {"prefix": [], "tail": {"kind": "clamped", "lower": 1.5, "upper": 3, "inner": universal}}
    job = {"command": "check", "inputs": {"exponents": clamped}}
    code, out, _ = run(job, "--samples", "30", "--seed", "4", monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["exponent"] == 1.5 and rep["meta"]["seed"] == 4


def test_horizon_exit_code(monkeypatch, capsys):
    job = {"command": "embed", "inputs": {"target": [1, 1], "host": 2}, "params": {"samples": 0}}
    code, out, _ = run(job, "--horizon", "100", monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 2 and rep["status"] == "horizon-exceeded"
    assert rep["result"]["partial"]["failed_step"] == 1


def test_norm_horizon_exit_code(monkeypatch, capsys):
    vec = {"generator": {"name": "power", "scale": 1, "decay": 1}, "certificate": {"k0": 1, "pmin": 2, "bound": 1.3}}
    job = {"command": "norm", "inputs": {"exponents": 2, "vector": vec}, "params": {"tol": 1e-12, "horizon": 50}}
    code, out, _ = run(job, monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 2 and rep["result"]["partial"]["enclosure"]["converged"] is False


@pytest.mark.parametrize(
    "job",
    [
        {"command": "nope"},
        {"command": "norm", "inputs": {"exponents": 0.5, "vector": [1]}},
        {"command": "norm", "inputs": {"exponents": 2}},
        {"command": "classify", "inputs": {"exponents": 2}, "params": {"tol": 1}},
        {"command": "probe", "inputs": {"budget": 2.5}},
        {"command": "check", "inputs": {"exponents": 2, "family": [[1, 1], [0, 1]]}},
        [1, 2, 3],
    ],
)
def test_invalid_input(job, monkeypatch, capsys):
    code, out, err = run(job, monkeypatch=monkeypatch, capsys=capsys)
    assert code == 1 and out == "" and "invalid input" in err


def test_malformed_json(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("{not json"))
    assert main([]) == 1
    assert capsys.readouterr().out == ""


def test_positional_command_must_match(monkeypatch, capsys):
    code, _, err = run({"command": "norm"}, "probe", monkeypatch=monkeypatch, capsys=capsys)
    assert code == 1 and "requested" in err


@pytest.mark.parametrize("command", ["norm", "embed", "classify", "check", "probe"])
def test_echo_round_trip(command):
    raw = json.loads((GOLDEN / f"{command}.job.json").read_text())
    job = JobSpec.parse(raw)
    report, _ = run_job(job)
    echoed = JobSpec.parse(json.loads(dumps(report))["job"])
    assert echoed == job


def test_file_io(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--input", str(GOLDEN / "probe.job.json"), "--output", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "probe.report.json").read_bytes()


def test_dumps_number_format():
    text = dumps({"a": 0.1, "b": 2.0, "c": math.inf, "d": [1, 1e-300], "e": True, "f": None})
    data = json.loads(text)
    assert '"a": 0.10000000000000001' in text and '"b": 2.0' in text
    assert data["c"] == "inf" and data["d"] == [1, 1e-300]
    with pytest.raises(ValueError):
        dumps(math.nan)
