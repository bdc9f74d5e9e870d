import json
import subprocess
import sys

import pytest

from qhdc import cli, schemas


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert cli.parse_range("4..7") == [4, 5, 6, 7]
    assert cli.parse_range("4-6") == [4, 5, 6]
    assert cli.parse_range("16,32") == [16, 32]


def test_reason_classical(capsys):
    code, out, _ = run(capsys, "reason", "--dim", "10000", "--mode", "classical", "--out", "json")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["answer"] == "Peso"
    schemas.validate("reason", doc)


def test_reason_quantum_matches_classical(capsys):
    _, q, _ = run(capsys, "reason", "--dim", "16", "--mode", "quantum", "--shots", "0", "--out", "json")
    _, c, _ = run(capsys, "reason", "--dim", "16", "--mode", "classical", "--out", "json")
    qs, cs = json.loads(q)["result"]["similarities"], json.loads(c)["result"]["similarities"]
    assert all(abs(qs[k] - cs[k]) < 1e-10 for k in cs)


def test_reason_usage_errors(capsys):
    code, _, err = run(capsys, "reason", "--dim", "10", "--mode", "quantum")
    assert code == 2 and "power of two" in err
    assert run(capsys, "reason", "--shots", "5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["reason", "--mode", "bogus"])
    assert exc.value.code == 2


def test_reason_wrong_answer_exits_one(capsys):
    # at D=2 every entity ties or collides; the answer is almost never Peso
    codes = {run(capsys, "reason", "--dim", "2", "--seed", str(s))[0] for s in range(4)}
    assert 1 in codes


def test_classify_synthetic_noiseless(capsys):
    code, out, _ = run(
        capsys, "classify", "--data", "synthetic", "--noise", "0", "--per-class", "60", "--dim", "10000",
        "--out", "json",
    )
    doc = json.loads(out)
    assert code == 0 and doc["result"]["f1_weighted_mean"] == 1.0
    schemas.validate("classify", doc)


def test_classify_sampled_std_error(capsys):
    code, out, _ = run(
        capsys, "classify", "--data", "synthetic", "--per-class", "40", "--dim", "32", "--mode", "quantum-sampled",
        "--shots", "10000", "--folds", "2", "--train-size", "30", "--test-size", "10", "--out", "json",
    )
    assert code == 0 and 0 < json.loads(out)["result"]["max_std_error"] <= 0.005


def test_classify_errors(capsys, tmp_path):
    missing = tmp_path / "missing.gz"
    assert run(capsys, "classify", "--images", str(missing), "--labels", str(missing))[0] == 3
    assert run(capsys, "classify", "--data", "synthetic", "--mode", "quantum-exact", "--dim", "100")[0] == 2
    assert run(capsys, "classify", "--data", "synthetic", "--per-class", "2")[0] == 4
    garbage = tmp_path / "bad.idx"
    garbage.write_bytes(b"\x00\x00\x08\x01\x00\x00\x00\x05")
    assert run(capsys, "classify", "--images", str(garbage), "--labels", str(garbage))[0] == 3


def test_classify_save_model_and_replay(capsys, tmp_path):
    model = tmp_path / "m.json"
    argv = ["classify", "--data", "synthetic", "--per-class", "40", "--dim", "64", "--folds", "2",
            "--train-size", "30", "--test-size", "10", "--no-timings", "--out", "json"]
    code, out, _ = run(capsys, *argv, "--save-model", str(model))
    assert code == 0
    schemas.validate("model", json.loads(model.read_text()))
    report = tmp_path / "r.json"
    report.write_text(out)
    code, replayed, _ = run(capsys, "replay", str(report))
    a, b = json.loads(out), json.loads(replayed)
    a["config"].pop("save_model")
    assert code == 0 and a == b


def test_resources(capsys):
    code, out, _ = run(capsys, "resources", "--qubits", "3..5", "--samples", "4", "--features", "4", "--out", "json")
    rows = json.loads(out)["result"]
    assert code == 0 and [r["n_qubits"] for r in rows] == [3, 4, 5]
    assert all(a["depth"] < b["depth"] for a, b in zip(rows, rows[1:]))
    _, csv_out, _ = run(capsys, "resources", "--qubits", "4", "--mode", "probabilistic", "--rounds", "3", "--out", "csv")
    assert csv_out.splitlines()[0].startswith("n_qubits,mode,rounds,depth,cnot_count")


def test_probabilistic_rounds_ratio(capsys):
    depth = {}
    for r in (1, 15):
        _, out, _ = run(capsys, "resources", "--qubits", "5", "--mode", "probabilistic", "--rounds", str(r), "--out", "json")
        depth[r] = json.loads(out)["result"][0]["depth"]
    assert depth[15] / depth[1] == pytest.approx(15, rel=0.15)


def test_sweep(capsys):
    code, out, _ = run(
        capsys, "sweep", "--data", "synthetic", "--per-class", "40", "--dims", "16,32", "--train-size", "40",
        "--test-size", "20", "--out", "json",
    )
    doc = json.loads(out)
    assert code == 0 and [r["dim"] for r in doc["result"]] == [16, 32]
    schemas.validate("sweep", doc)
    assert run(capsys, "sweep", "--data", "synthetic", "--dims", "24")[0] == 2


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--out", "json")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["passed"]
    schemas.validate("selftest", doc)


def test_selftest_catches_corrupted_reflection(capsys):
    code, out, _ = run(capsys, "selftest", "--s0-sign", "1")
    assert code == 1
    assert "FAIL  grover-law" in out
    assert "selftest FAILED: grover-law" in out


def test_replay_rejects_non_report(capsys, tmp_path):
    p = tmp_path / "x.json"
    p.write_text("not json")
    assert run(capsys, "replay", str(p))[0] == 3
    p.write_text(json.dumps({"command": "nope"}))
    assert run(capsys, "replay", str(p))[0] == 3


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "qhdc.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
