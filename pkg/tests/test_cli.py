import json
from pathlib import Path

import pytest

from qglab.main import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_verify_modes_writes_certificate(tmp_path, capsys):
    assert main(["verify-modes", "--output", str(tmp_path), "--seed", "5"]) == 0
    printed = json.loads(capsys.readouterr().out)
    stored = json.loads((tmp_path / "verify-modes.json").read_text(encoding="utf-8"))
    assert printed == stored
    assert stored["passed"] is True
    assert stored["seed"] == 5
    assert "elapsed" not in stored


def test_bad_config_exits_with_two(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"mode": "qg4d"}), encoding="utf-8")
    assert main(["run-stage", "--config", str(config), "--output", str(tmp_path)]) == 2
    assert "mode" in capsys.readouterr().err


def test_non_positive_tolerance_scale_exits_with_two(tmp_path, capsys):
    assert main(["verify-modes", "--output", str(tmp_path), "--tolerance-scale", "0"]) == 2
    assert "tolerance-scale" in capsys.readouterr().err


def test_report_without_run_exits_with_two(tmp_path, capsys):
    assert main(["report", "--output", str(tmp_path / "empty")]) == 2
    assert "report.json" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


@pytest.mark.slow
def test_zero_energy_stage_passes_and_is_reproducible(tmp_path, capsys):
    config = str(CONFIGS / "zero_energy.json")
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["run-stage", "--config", config, "--output", str(first)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert report["stages"][0]["zero_perturbation"] is True
    assert report["stages"][0]["stress_c0"] == 0.0

    assert main(["run-stage", "--config", config, "--output", str(second)]) == 0
    for name in ("stage0.csv", "report.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()

    capsys.readouterr()
    assert main(["report", "--output", str(first)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("run-stage mode=qg3d")
    assert all(line.startswith(("PASS", "info")) for line in lines[1:])


def test_report_replays_failed_verdict(tmp_path, capsys):
    config = str(CONFIGS / "zero_energy.json")
    assert main(["run-stage", "--config", config, "--output", str(tmp_path), "--mode", "euler2d"]) == 1
    capsys.readouterr()
    assert main(["report", "--output", str(tmp_path)]) == 1
    assert "lattice-frequency" in capsys.readouterr().err


def test_crashing_stage_is_recorded_in_the_report(tmp_path, capsys, monkeypatch):
    from qglab.api.commands import stage

    def crash(*args, **kwargs):
        raise NameError("name 'gradient' is not defined")

    monkeypatch.setattr(stage, "run_stage", crash)
    config = str(CONFIGS / "zero_energy.json")
    assert main(["run-stage", "--config", config, "--output", str(tmp_path)]) == 1
    assert "internal-error" in capsys.readouterr().err
    stored = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert stored["passed"] is False
    assert stored["failed_assumption"] == "internal-error"
    assert stored["ledger"][-1]["name"] == "stage0.error"
