import csv
import json

import pytest

from qmeasure.cli import main

S1 = {"name": "S1", "packet": {"x0": 0, "alpha": 1, "k": 1}, "device": {"sigma": 1, "lambda": 0},
      "sampling": {"count": 20000, "seed": 3}}


@pytest.fixture
def config(tmp_path):
    def write(body=S1, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(body))
        return str(path)
    return write


def test_simulate_writes_report(config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", config(), "-o", str(out), "--fields", "f.csv"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["params_R"]["std_x_unit"] == "length"
    with (out / "f.csv").open() as fh:
        header = next(csv.reader(fh))
    assert header[0] == "x [length]" and len(header) == 5


def test_simulate_figures(config, tmp_path):
    assert main(["simulate", config(), "-o", str(tmp_path), "--figures"]) == 0
    png = tmp_path / "S1_readings.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_verify_exit_codes(config, capsys):
    assert main(["verify", config()]) == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0].startswith("field,numeric,reference")
    assert main(["verify", config(), "--n", "64"]) == 1
    assert "verification failed:" in capsys.readouterr().err


def test_verify_table_file(config, tmp_path):
    assert main(["verify", config(), "-o", str(tmp_path), "--table", "t.csv"]) == 0
    assert (tmp_path / "t.csv").read_text().startswith("field,")


def test_config_error_exit_code(config, tmp_path, capsys):
    assert main(["simulate", config({"device": {"sigma": 1}})]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "nope.json")]) == 2
    assert main(["verify", config(), "--n", "8"]) == 2


def test_numerical_error_exit_code(config, capsys):
    body = {**S1, "device": {"sigma": 0, "lambda": 1}}
    assert main(["simulate", config(body)]) == 3
    assert "numerical validity error (DivergenceError)" in capsys.readouterr().err


def test_sweep_command(config, tmp_path, capsys):
    args = ["sweep", config(), "-o", str(tmp_path), "--sigma", "0", "1", "--lambda", "0", "1", "--figures"]
    assert main(args) == 0
    rows = list(csv.DictReader((tmp_path / "sweep.csv").open()))
    assert len(rows) == 4
    assert rows[1]["valid"] == "False"
    assert "1 of 4 points flagged" in capsys.readouterr().err
    assert (tmp_path / "S1_sweep.png").exists()
    assert main(["sweep", config(), "--sigma", "--lambda", "0"]) == 2


def test_sample_command_is_reproducible(config, tmp_path, capsys):
    assert main(["sample", config(), "-o", str(tmp_path / "a")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["config"]["sampling"] == {"count": 20000, "seed": 3}
    assert abs(summary["std_x"] / summary["reference_std_x"] - 1) < 0.02
    assert main(["sample", config(), "-o", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a/samples.csv").read_bytes() == (tmp_path / "b/samples.csv").read_bytes()


def test_sample_needs_seed(config):
    body = {k: v for k, v in S1.items() if k != "sampling"}
    assert main(["sample", config(body)]) == 2
