from __future__ import annotations

import csv
import json
import math

import pytest

from catgate import cli, config


@pytest.fixture
def defaults_file(tmp_path):
    p = tmp_path / "defaults.toml"
    p.write_text(config.default_config_text())
    return p


def test_validate_defaults(capsys, defaults_file):
    assert cli.main(["validate", "--config", str(defaults_file)]) == 0
    assert "regime: OK" in capsys.readouterr().out


def test_validate_sign_violation(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text(config.default_config_text().replace("omega_a_ghz = 7.5", "omega_a_ghz = 6.0"))
    assert cli.main(["validate", "--config", str(p)]) == 1
    assert "sign convention" in capsys.readouterr().err


def test_validate_regime_failure(tmp_path):
    p = tmp_path / "strong.toml"
    p.write_text(config.default_config_text().replace("g_mhz = 95.0", "g_mhz = 500.0"))
    assert cli.main(["validate", "--config", str(p)]) == 1


def test_missing_key_parse_error(tmp_path, capsys):
    p = tmp_path / "missing.toml"
    p.write_text(config.default_config_text().replace("g_mhz = 95.0\n", ""))
    assert cli.main(["validate", "--config", str(p)]) == 2
    assert "g_mhz" in capsys.readouterr().err


def test_env_variable_selects_config(tmp_path, monkeypatch):
    p = tmp_path / "bad.toml"
    p.write_text("[system]\n")
    monkeypatch.setenv(config.ENV_CONFIG, str(p))
    assert cli.main(["validate"]) == 2


def test_derive_output(capsys, tmp_path):
    out = tmp_path / "derived.csv"
    assert cli.main(["derive", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    values = {line.split()[0]: float(line.split()[1]) for line in text.splitlines()}
    assert values["t1"] == pytest.approx(0.674, abs=5e-4)
    assert values["t2"] == values["t1"]
    assert abs(values["stark_residual"]) < 1e-10
    assert values["g_t/2pi"] == pytest.approx(95.0, rel=1e-12)
    assert values["chi/2pi"] == pytest.approx(0.742, abs=5e-4)
    assert (tmp_path / "derived.manifest.json").exists()


def test_truth_table_green(tmp_path, capsys):
    out = tmp_path / "tt.csv"
    assert cli.main(["truth-table", "--tier", "green", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["input"] for r in rows] == ["00", "01", "10", "11"]
    for r in rows:
        target = math.pi if r["input"] == "11" else 0.0
        assert abs(math.remainder(float(r["phase_rad"]) - target, 2 * math.pi)) < 1e-6
        assert float(r["magnitude"]) >= 1 - 1e-6


def test_sweep_green_paper4(tmp_path):
    out = tmp_path / "sweep.csv"
    code = cli.main(["sweep", "--tiers", "green", "--kappa-grid", "100,300", "--states", "paper4",
                     "--out", str(out), "--jobs", "1"])
    assert code == 0
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert list(rows[0])[:11] == list(cli.CSV_COLUMNS)
    assert all(float(r["fidelity"]) >= 1 - 1e-6 for r in rows)
    manifest = json.loads((tmp_path / "sweep.manifest.json").read_text())
    assert manifest["config"]["system"]["g_mhz"] == 95.0
    assert len(manifest["runtimes_s"]) == 8
    assert len(json.loads((tmp_path / "sweep.json").read_text())) == 8
    assert len(list(tmp_path.glob("sweep.panel*.csv"))) == 4


def _strip_runtime(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    idx = rows[0].index("runtime_s")
    return [r[:idx] + r[idx + 1:] for r in rows]


def test_sweep_output_deterministic(tmp_path):
    args = ["sweep", "--tiers", "green,blue", "--kappa-grid", "100:300:2", "--states", "pi4-pi4;th=0.3,ph=1.2",
            "--trunc", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = tmp_path / "loose.toml"
    cfg.write_text(config.default_config_text() + "eps = 1e-4\n")
    assert cli.main(args + ["--config", str(cfg), "--out", str(a), "--jobs", "1"]) == 0
    assert cli.main(args + ["--config", str(cfg), "--out", str(b), "--jobs", "2"]) == 0
    assert _strip_runtime(a) == _strip_runtime(b)


def test_full_precision_numbers(tmp_path):
    out = tmp_path / "run.csv"
    assert cli.main(["run", "--tier", "green", "--state", "pi3-pi4", "--out", str(out)]) == 0
    row = next(csv.DictReader(out.open()))
    assert float(row["t1_us"]) == pytest.approx(0.673724522638249, rel=1e-15)
    assert len(row["t1_us"].replace("0.", "", 1)) >= 15


def test_quality_report(capsys, tmp_path):
    out = tmp_path / "q.csv"
    assert cli.main(["quality-report", "--kappa-inv", "300", "--out", str(out)]) == 0
    rows = {r["resonator"]: r for r in csv.DictReader(out.open())}
    assert float(rows["b_t"]["q"]) == pytest.approx(6.6e6, rel=0.01)


def test_grid_and_state_parsing():
    assert cli.parse_grid("100,300") == [100.0, 300.0]
    assert cli.parse_grid("100:300:3") == [100.0, 200.0, 300.0]
    assert len(cli.parse_states("paper4")) == 4
    spec = cli.parse_states("th=0.785,ph=0.5")[0]
    assert (spec.theta, spec.phi) == (0.785, 0.5)
    for bad in ("", "0,-1", "1:2", "a,b"):
        with pytest.raises(ValueError):
            cli.parse_grid(bad)
    with pytest.raises(ValueError):
        cli.parse_states("th=1")


def test_bad_grid_exit_code():
    assert cli.main(["sweep", "--tiers", "green", "--kappa-grid", "-5"]) == 1


@pytest.mark.slow
def test_sweep_red_pi4(tmp_path, capsys):
    out = tmp_path / "red.csv"
    code = cli.main(["sweep", "--tiers", "red", "--kappa-grid", "300", "--states", "pi4-pi4", "--trunc", "8",
                     "--out", str(out), "--jobs", "1"])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1
    assert float(rows[0]["fidelity"]) >= 0.9868
