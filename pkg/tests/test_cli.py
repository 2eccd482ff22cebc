from __future__ import annotations

import json

import pytest

from wlsurv.censoring import bundled_path
from wlsurv.cli import main, read_config, InputError

RATS = str(bundled_path("rats"))
DEVICES = str(bundled_path("devices"))


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fit_devices(tmp_path, capsys):
    code, out, _ = run(["fit", DEVICES, "--scheme", "type2", "--r", "49", "--out", str(tmp_path)], capsys)
    assert code == 0
    payload = json.loads((tmp_path / "fit.json").read_text())
    assert payload["estimates"]["phi"] == pytest.approx(0.6764, abs=5e-4)
    assert payload["manifest"]["command"] == "fit"
    assert payload["manifest"]["scheme"] == {"model": "wl", "r": 49, "scheme": "type2"}
    lines = (tmp_path / "survival_curve.csv").read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    assert lines[1] == "time,survival"
    assert len(lines) == 2 + 200
    assert lines[2] == "0,1"


def test_fit_is_byte_reproducible(tmp_path, capsys):
    out = str(tmp_path / "o")
    run(["fit", RATS, "--out", out], capsys)
    first = (tmp_path / "o" / "fit.json").read_bytes()
    run(["fit", RATS, "--out", out], capsys)
    assert (tmp_path / "o" / "fit.json").read_bytes() == first


def test_missing_status_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n1,1\n")
    code, _, err = run(["fit", str(bad), "--out", str(tmp_path)], capsys)
    assert code == 1
    assert "status" in err and "line 1" in err


def test_scheme_flag_errors(tmp_path, capsys):
    code, _, err = run(["fit", RATS, "--scheme", "type2", "--out", str(tmp_path)], capsys)
    assert code == 1 and "--r" in err
    code, _, _ = run(["fit", RATS, "--scheme", "complete", "--out", str(tmp_path)], capsys)
    assert code == 1


def test_compare_devices(tmp_path, capsys):
    code, out, _ = run(["compare", DEVICES, "--scheme", "type2", "--r", "49", "--out", str(tmp_path)], capsys)
    assert code == 0
    ranking = json.loads((tmp_path / "compare.json").read_text())["ranking"]
    assert ranking[0]["model"] == "wl"
    assert ranking[0]["aic"] == pytest.approx(185.1739, abs=1e-3)
    assert out.splitlines()[1].split()[1:3] == ["Weighted", "Lindley"]
    overlay = (tmp_path / "overlay.csv").read_text().splitlines()
    assert overlay[1] == "time,km,wl,weibull,gamma"
    assert len(overlay) == 202


def test_compare_single_row(tmp_path, capsys):
    one = tmp_path / "one.csv"
    one.write_text("time,status\n1.5,1\n")
    code, _, _ = run(["compare", str(one), "--out", str(tmp_path)], capsys)
    assert code == 1


def test_ttt_and_km(tmp_path, capsys):
    code, out, _ = run(["ttt", RATS, "--out", str(tmp_path)], capsys)
    assert code == 0 and out.strip() == "increasing"
    code, out, _ = run(["ttt", DEVICES, "--out", str(tmp_path)], capsys)
    assert out.strip() == "bathtub"
    const = tmp_path / "const.csv"
    const.write_text("time,status\n2,1\n2,1\n2,1\n")
    run(["ttt", str(const), "--out", str(tmp_path)], capsys)
    rows = (tmp_path / "ttt.csv").read_text().splitlines()[2:]
    assert [r.split(",")[1] for r in rows] == ["1", "1", "1"]
    code, _, _ = run(["km", RATS, "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "km.csv").read_text().splitlines()[1] == "time,survival"


def test_simulate_single_replicate(tmp_path, capsys):
    code, _, _ = run(["simulate", "--phi", "0.5", "--lambda", "2", "--n", "40", "--scheme", "type2",
                      "--r", "32", "--replicates", "1", "--seed", "7", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "simulation.json").read_text())
    assert rep["replicates"] == {"attempted": 1, "converged": 1, "discarded": 0}
    assert rep["manifest"]["seed"] == 7
    assert rep["coverage"]["phi"] in (0.0, 1.0)
    csv_lines = (tmp_path / "simulation.csv").read_text().splitlines()
    assert csv_lines[1].startswith("n,r,MRE_phi")


def test_simulate_config_file_and_calibration_failure(tmp_path, capsys):
    cfg = tmp_path / "study.txt"
    cfg.write_text("# study\nphi = 2\nlambda=3\nn=20\nscheme=random\np-target=1.5\nreplicates=5\n")
    code, _, err = run(["simulate", "--config", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 3 and "unattainable" in err
    code, _, _ = run(["simulate", "--config", str(cfg), "--p-target", "0.3", "--out", str(tmp_path)], capsys)
    assert code == 0


def test_read_config_errors(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("phi 2\n")
    with pytest.raises(InputError):
        read_config(cfg)
    cfg.write_text("colour=blue\n")
    with pytest.raises(InputError):
        read_config(cfg)


def test_simulate_missing_flags(tmp_path, capsys):
    code, _, err = run(["simulate", "--phi", "1", "--out", str(tmp_path)], capsys)
    assert code == 1 and "--lambda" in err
