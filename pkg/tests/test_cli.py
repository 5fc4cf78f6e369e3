import json
import shutil
import subprocess

import numpy as np
import pytest

from geomedian import read_csv, write_csv
from geomedian.cli import main


@pytest.fixture()
def capsysbytes(capsys):
    def read():
        out = capsys.readouterr()
        return out.out, out.err

    return read


def _write_univariate(tmp_path):
    path = tmp_path / "u.csv"
    write_csv(path, np.array([[1.0], [2.0], [3.0], [4.0], [5.0]]))
    return str(path)


def _write_sample(tmp_path, seed=0, n=12, p=3, name="s.csv"):
    rng = np.random.default_rng(seed)
    path = tmp_path / name
    write_csv(path, rng.standard_normal((n, p)))
    return str(path)


def test_estimate_univariate_median(tmp_path, capsys):
    code = main(["estimate", "--in", _write_univariate(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["theta_hat"] == [3.0]
    assert payload["grad_norm"] == 0.0


def test_estimate_csv_format(tmp_path, capsys):
    main(["estimate", "--in", _write_univariate(tmp_path), "--format", "csv"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "theta_hat"
    assert float(lines[1]) == 3.0


def test_seeded_commands_are_byte_deterministic(tmp_path, capsys):
    data = _write_sample(tmp_path)
    outputs = []
    for workers in ("1", "4", "1"):
        assert main(["sci", "--in", data, "--level", "0.9", "--boot", "300",
                     "--seed", "7", "--workers", workers]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1] == outputs[2]


def test_stochastic_commands_require_seed(tmp_path, capsys):
    data = _write_sample(tmp_path)
    assert main(["sci", "--in", data]) == 1
    assert "seed" in capsys.readouterr().err
    assert main(["test", "--in", data, "--method", "median"]) == 1
    assert main(["gmom", "--in", data, "--blocks", "3"]) == 1


def test_wpl_and_cq_need_no_seed(tmp_path, capsys):
    data = _write_sample(tmp_path)
    assert main(["test", "--in", data, "--method", "wpl"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "wpl"
    assert main(["test", "--in", data, "--method", "cq", "--alpha", "0.1"]) == 0


def test_unknown_flags_and_bad_usage_exit_one(tmp_path, capsys):
    data = _write_sample(tmp_path)
    assert main(["estimate", "--in", data, "--frobnicate"]) == 1
    assert main(["estimate"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["sci", "--in", data, "--seed", "1", "--format", "yaml"]) == 1


def test_computation_error_exits_two_with_json(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\nnan,4.0\n")
    assert main(["estimate", "--in", str(path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "NonFiniteEntry"


def test_missing_file_exits_two(capsys):
    assert main(["estimate", "--in", "/nonexistent/nope.csv"]) == 2


def test_gmom_output(tmp_path, capsys):
    data = _write_sample(tmp_path)
    assert main(["gmom", "--in", data, "--blocks", "3", "--seed", "5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["gmom"]) == 3
    assert payload["blocks"] == 3


def test_test_subcommand_against_null_file(tmp_path, capsys):
    data = _write_sample(tmp_path)
    null_path = tmp_path / "null.csv"
    write_csv(null_path, np.zeros((1, 3)))
    assert main(["test", "--in", data, "--null", str(null_path), "--method", "mean",
                 "--seed", "3", "--boot", "200"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"method", "statistic", "critical_value", "p_value", "reject"}


def test_fdr_subcommand_json_and_csv(tmp_path, capsys):
    rng = np.random.default_rng(1)
    values = rng.standard_normal((40, 5)) * 0.3
    values[:, 2] += 4.0
    path = tmp_path / "f.csv"
    write_csv(path, values)
    assert main(["fdr", "--in", str(path), "--null", "zeros", "--alpha", "0.1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert 2 in payload["rejected"]
    assert main(["fdr", "--in", str(path), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "index,t_stat,p_value,rejected"
    assert len(lines) == 6


def test_are_subcommand(tmp_path, capsys):
    data = _write_sample(tmp_path, n=30, p=10)
    assert main(["are", "--in", data, "--boot", "200", "--seed", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["are_estimate"] > 0


def test_generate_writes_readable_csv(tmp_path, capsys):
    config = tmp_path / "gen.json"
    config.write_text(json.dumps({
        "model": "student_t", "df": 3.0, "n": 8, "p": 4, "rho": 0.5,
        "theta": {"kind": "sparse3"}, "seed": 11,
    }))
    out = tmp_path / "sample.csv"
    assert main(["generate", "--config", str(config), "--out", str(out)]) == 0
    sample = read_csv(out)
    assert (sample.n, sample.p) == (8, 4)
    assert main(["generate", "--config", str(config)]) == 0
    stdout = capsys.readouterr().out
    assert len(stdout.strip().splitlines()) == 8


def test_generate_requires_seed(tmp_path, capsys):
    config = tmp_path / "gen.json"
    config.write_text(json.dumps({"model": "gaussian", "n": 4, "p": 2}))
    assert main(["generate", "--config", str(config)]) == 1
    assert main(["generate", "--config", str(config), "--seed", "3"]) == 0
    capsys.readouterr()


def test_simulate_end_to_end(tmp_path, capsys):
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps({
        "experiment": "coverage", "model": "gaussian", "n": 12, "p": 3,
        "theta": {"kind": "zero"}, "replications": 3, "B": 30,
        "levels": [0.9], "seed": 4,
    }))
    assert main(["simulate", "--config", str(config), "--format", "csv"]) == 0
    first = capsys.readouterr().out
    assert first.splitlines()[0].startswith("scenario,")
    assert main(["simulate", "--config", str(config), "--format", "csv", "--workers", "4"]) == 0
    assert capsys.readouterr().out == first
    assert main(["simulate", "--config", str(config), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["runtime_seconds"] is None


def test_out_flag_writes_file(tmp_path, capsys):
    data = _write_sample(tmp_path)
    target = tmp_path / "result.json"
    assert main(["estimate", "--in", data, "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    payload = json.loads(target.read_text())
    assert len(payload["theta_hat"]) == 3


@pytest.mark.skipif(shutil.which("geomedian") is None, reason="console script not installed")
def test_console_script_entry_point(tmp_path):
    data = _write_univariate(tmp_path)
    proc = subprocess.run(
        ["geomedian", "estimate", "--in", data], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["theta_hat"] == [3.0]


def test_help_documents_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sci", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--in", "--out", "--level", "--boot", "--seed", "--workers", "--format"):
        assert flag in text
