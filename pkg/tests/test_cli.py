import json
import subprocess
import sys

import pytest

from eigadm.cli import (
    EXIT_BAD_SPECTRUM,
    EXIT_IO,
    EXIT_NOT_SYMMETRIC,
    EXIT_NU_TOO_SMALL,
    EXIT_USAGE,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_estimate_p1(tmp_path, capsys):
    code, out, _ = run(capsys, "estimate", "--input", write(tmp_path, "s.txt", "7.0\n"), "--nu", "5")
    assert code == 0
    assert json.loads(out)["psi_star"] == [1.0]


def test_estimate_spectrum(tmp_path, capsys):
    code, out, _ = run(capsys, "estimate", "--input", write(tmp_path, "s.txt", "3, 1\n"), "--nu", "5", "--n-points", "300")
    res = json.loads(out)
    assert code == 0
    assert all(0 < v <= 3 / 7 for v in res["psi_star"])
    assert res["phi_star"] == [3 / 7, 1 / 7] and res["mle"] == [0.6, 0.2]
    assert all(abs(s - 1 / 7) <= 1e-12 for s in res["tau_row_sums"])
    assert len(res["ess"]) == 2


def test_estimate_matrix_json(tmp_path, capsys):
    code, out, _ = run(capsys, "estimate", "--input", write(tmp_path, "m.json", "[[2, 1], [1, 2]]"), "--nu", "5")
    res = json.loads(out)
    assert code == 0 and res["input"] == "matrix"
    assert res["l"] == pytest.approx([3.0, 1.0], abs=1e-14)


def test_estimate_writes_file(tmp_path, capsys):
    out = tmp_path / "o.json"
    run(capsys, "estimate", "--input", write(tmp_path, "s.txt", "3 1"), "--nu", "5", "--out", str(out))
    assert json.loads(out.read_text())["nu"] == 5.0


@pytest.mark.parametrize(
    "name, text, nu, code",
    [
        ("m.txt", "2 1\n0 2\n", "5", EXIT_NOT_SYMMETRIC),
        ("s.txt", "1 3\n", "5", EXIT_BAD_SPECTRUM),
        ("s.txt", "3 -1\n", "5", EXIT_BAD_SPECTRUM),
        ("s.txt", "3 2 1\n", "2", EXIT_NU_TOO_SMALL),
    ],
)
def test_estimate_errors(tmp_path, capsys, name, text, nu, code):
    got, out, err = run(capsys, "estimate", "--input", write(tmp_path, name, text), "--nu", nu)
    assert got == code
    assert err.startswith("error:") and err.count("\n") == 1


def test_missing_input_is_io_error(tmp_path, capsys):
    code, _, err = run(capsys, "estimate", "--input", str(tmp_path / "nope"), "--nu", "5")
    assert code == EXIT_IO and err.startswith("error:")


def test_usage_errors(capsys):
    assert run(capsys, "tables", "--table", "3")[0] == EXIT_USAGE
    code, _, err = run(capsys, "bogus")
    assert code == EXIT_USAGE and err.startswith("error:")
    assert run(capsys, "risk", "--p", "3", "--nu", "5", "--lambda", "1,1")[0] == EXIT_USAGE
    assert run(capsys, "risk", "--p", "2", "--nu", "5", "--lambda", "1,2")[0] == EXIT_BAD_SPECTRUM


def test_risk_csv(capsys):
    code, out, _ = run(capsys, "risk", "--p", "2", "--nu", "5", "--lambda", "1,1", "--estimator", "phi_star", "--n-rep", "500")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "pattern,nu,estimator,risk,std_error,n_rep"
    assert lines[1].startswith("1.0|1.0,5,phi_star,") and lines[1].endswith(",500")


def test_tables_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "tables", "--table", "1", "--n-rep", "4", "--n-points", "10", "--out", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 42


def test_tables_single_estimator_rows(tmp_path, capsys):
    out = tmp_path / "t.csv"
    run(capsys, "tables", "--table", "2", "--n-rep", "4", "--n-points", "10", "--estimators", "phi_star", "--out", str(out))
    assert len(out.read_text().splitlines()) == 1 + 27


def test_config_merge_flags_win(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", json.dumps({"n_rep": 7, "seed": 3, "lambda": [1, 0.5]}))
    code, out, _ = run(capsys, "risk", "--config", cfg, "--p", "2", "--nu", "5", "--estimator", "mle", "--n-rep", "9", "--format", "json")
    res = json.loads(out)
    assert code == 0
    assert res["metadata"]["seed"] == 3 and res["metadata"]["n_rep"] == 9
    assert res["rows"][0]["lambda"] == [1.0, 0.5]


def test_env_seed(monkeypatch, capsys, tmp_path):
    monkeypatch.setenv("EIGADM_SEED", "123")
    _, out, _ = run(capsys, "estimate", "--input", write(tmp_path, "s.txt", "3 1"), "--nu", "5", "--n-points", "10")
    assert json.loads(out)["seed"] == 123
    _, out, _ = run(capsys, "estimate", "--input", write(tmp_path, "s.txt", "3 1"), "--nu", "5", "--n-points", "10", "--seed", "5")
    assert json.loads(out)["seed"] == 5


def test_selftest_command(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert out.strip().endswith("checks passed")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eigadm", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
