import csv
import json
import math

import pytest

from kgwave.cli import main

L0 = "6.2831853"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_wave(tmp_path, capsys):
    code, out, _ = run(capsys, "wave", "--k", "1", "--L0", L0, "--kappa", "0.5", "--out", str(tmp_path))
    assert code == 0
    assert float(out.split("residual=")[1].split()[0]) <= 1e-8
    assert rows(tmp_path / "wave.csv")[0].keys() == {"x", "h", "hprime"}
    assert json.loads((tmp_path / "wave_params.json").read_text())["params"]["k"] == 1
    assert (tmp_path / "wave.png").stat().st_size > 0


def test_wave_json_format(tmp_path, capsys):
    code, _, _ = run(capsys, "wave", "--omega", "1", "--B", "0.1", "--N", "64", "--format", "json", "--no-plot", "--out", str(tmp_path))
    assert code == 0
    data = json.loads((tmp_path / "wave.json").read_text())
    assert len(data["h"]) == 64


def test_wave_usage_errors(tmp_path, capsys):
    code, _, err = run(capsys, "wave", "--k", "1", "--out", str(tmp_path))
    assert code == 2 and "usage" in err
    code, _, _ = run(capsys, "wave", "--L0", L0, "--kappa", "0.5", "--omega", "0.5", "--out", str(tmp_path))
    assert code == 2


def test_wave_bad_modulus(tmp_path, capsys):
    code, _, err = run(capsys, "wave", "--L0", L0, "--kappa", "1.5", "--out", str(tmp_path))
    assert code == 1 and "modulus out of range" in err


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2


def test_period_sweep_single_and_skipped(tmp_path, capsys):
    code, _, _ = run(capsys, "period-sweep", "--k", "2", "--omega", "0.5", "--B", "0.1", "--no-plot", "--out", str(tmp_path))
    assert code == 0
    assert len(rows(tmp_path / "period_sweep.csv")) == 1
    code, _, _ = run(capsys, "period-sweep", "--k", "1", "--omega", "1", "--B-frac", "0.5,1.0", "--no-plot", "--out", str(tmp_path))
    assert code == 0
    got = rows(tmp_path / "period_sweep.csv")
    assert [r["status"] for r in got][1] == "skipped"
    for col in ("L_quad", "L_shoot", "L_B", "theta", "L_B_plus_theta"):
        assert col in got[0]


def test_floquet(tmp_path, capsys):
    code, out, _ = run(capsys, "floquet", "--L0", L0, "--kappa", "0.5", "--out", str(tmp_path))
    assert code == 0 and "kernel=simple" in out
    summary = json.loads((tmp_path / "floquet_summary.json").read_text())
    assert summary["theta"] < 0


def test_spectrum_kg(tmp_path, capsys):
    code, out, _ = run(capsys, "spectrum", "--kind", "kg", "--k", "1", "--kappa", "0.5", "--L0", L0, "--spectrum-N", "256", "--out", str(tmp_path))
    assert code == 0 and "n_neg=1 n_zero=1" in out


def test_spectrum_odd_coercivity(tmp_path, capsys):
    code, out, _ = run(capsys, "spectrum", "--kind", "odd", "--omega", "1", "--L0", "8", "--N", "256", "--no-plot", "--out", str(tmp_path))
    assert code == 0 and "violations=0" in out


def test_ddc_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "ddc", "--k", "2", "--L0", L0, "--kappa-grid", "0.1:0.9:9", "--out", str(tmp_path))
    assert code == 0
    got = rows(tmp_path / "ddc.csv")
    assert len(got) == 9
    assert {r["verdict"] for r in got} == {"unstable_in_X"}
    assert all(r["tau_sign"] == "1" for r in got)


def test_ddc_needs_a_point(tmp_path, capsys):
    code, _, _ = run(capsys, "ddc", "--L0", L0, "--out", str(tmp_path))
    assert code == 2


def test_evolve_flat(tmp_path, capsys):
    code, out, _ = run(capsys, "evolve", "--mode", "odd", "--c", "0", "--epsilon", "0", "--T", "5", "--out", str(tmp_path))
    assert code == 0
    got = rows(tmp_path / "evolve.csv")
    assert len(got) == 6
    assert max(float(r["distance"]) for r in got) <= 1e-9
    manifest = json.loads((tmp_path / "evolve_manifest.json").read_text())
    assert manifest["termination"] == "completed"


def test_evolve_parity_error(tmp_path, capsys):
    code, _, err = run(capsys, "evolve", "--mode", "odd", "--c", "0.5", "--T", "1", "--no-plot", "--out", str(tmp_path))
    assert code == 1 and "c = 0" in err


def test_logging_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("KGWAVE_LOG", "debug")
    code, out, _ = run(capsys, "wave", "--k", "2", "--L0", L0, "--kappa", "0.6", "--no-plot", "--out", str(tmp_path))
    assert code == 0 and math.isfinite(float(out.split("residual=")[1].split()[0]))
