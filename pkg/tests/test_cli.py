"""
Tests for the command-line entry point and its exit codes.
"""

import pytest

from cli import EXIT_INVALID, EXIT_OK, main


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_OK
    assert "magfield" in capsys.readouterr().out


def test_exact_sweep_writes_csv(tmp_path):
    path = tmp_path / "magfield.csv"
    code = main(["magfield", "--steps", "5", "--exact", "--initial", "0", "--csv", str(path)])
    assert code == EXIT_OK
    assert len(path.read_text(encoding="utf-8").splitlines()) == 6


def test_sweep_from_config_file(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text("steps=3\nshots=64\nseed=4\n", encoding="utf-8")
    path = tmp_path / "ising.csv"
    assert main(["ising", "--config", str(config), "--csv", str(path)]) == EXIT_OK
    assert len(path.read_text(encoding="utf-8").splitlines()) == 4


def test_invalid_sweep_arguments():
    assert main(["magfield", "--steps", "1"]) == EXIT_INVALID
    assert main(["ising", "--initial", "m=0"]) == EXIT_INVALID


def test_missing_noise_file(tmp_path):
    assert main(["ising", "--steps", "3", "--noise", str(tmp_path / "absent")]) == EXIT_INVALID


def test_malformed_angle_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["magfield", "--max-param", "2**pi"])
    assert info.value.code == EXIT_INVALID


def test_algebra_check_command():
    assert main(["algebra-check", "--max-twice-s", "3"]) == EXIT_OK
    assert main(["algebra-check", "--max-twice-s", "0"]) == EXIT_INVALID


def test_error_budget_command(device_file, capsys):
    assert main(["error-budget", "--noise", device_file]) == EXIT_OK
    assert "16.627" in capsys.readouterr().out


def test_export_qasm_command(tmp_path):
    path = tmp_path / "field.qasm"
    code = main(
        ["export-qasm", "--experiment", "magfield", "--initial", "-1",
         "--param", "pi/2", "--qasm", str(path)]
    )
    assert code == EXIT_OK
    assert path.read_text(encoding="utf-8").startswith("OPENQASM 2.0;\n")
