"""
CLI 서브커맨드 테스트
"""
import math

import pytest

from delay_duffing.cli.verify import run_checks
from delay_duffing.core.csv_io import read_table
from delay_duffing.main import main


def test_amplitude_table(output_dir, capsys):
    assert main(["amplitude", "--T", "0.6", "--n", "1,2"]) == 0
    out = capsys.readouterr().out
    assert "6.29721145" in out
    assert "12.30144591" in out
    table = read_table(output_dir / "cli_amplitude.csv")
    assert table["schema"] == "delay-duffing/amplitude v1"
    assert table["columns"] == ["T", "n", "A", "p", "H", "omega", "m"]
    assert len(table["rows"]) == 2


@pytest.mark.parametrize("argv", [
    ["amplitude", "--n", "0"],
    ["amplitude", "--T", "-1"],
    ["amplitude", "--T", "abc"],
    ["unknown-command"],
    ["verify", "--inject-fault", "nope"],
])
def test_usage_errors_exit_with_code_two(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_computation_errors_exit_with_code_one(output_dir, capsys):
    assert main(["classify", "--T", "0.3", "--n", "11", "--b", "0"]) == 1
    assert main(["amplitude", "--T", "10", "--n", "2"]) == 1
    assert main(["amplitude", "--config", str(output_dir / "missing.yaml"), "--T", "0.6"]) == 1
    assert main(["simulate", "--T", "0.6", "--n", "1"]) == 1
    assert "오류" in capsys.readouterr().err


def test_classify_and_tcrit(output_dir, capsys):
    assert main(["classify", "--T", "0.3", "--n", "11,12"]) == 0
    rows = read_table(output_dir / "cli_classify.csv")["rows"]
    assert [row[3] for row in rows] == ["stable", "unstable"]

    assert main(["tcrit", "--n", "1,2", "--k", "1,3"]) == 0
    rows = read_table(output_dir / "cli_tcrit.csv")["rows"]
    assert len(rows) == 4
    boundaries = [float(row[3]) for row in rows]
    assert any(value == pytest.approx(math.pi * math.sqrt(1.5), rel=1e-14) for value in boundaries)


def test_simulate_writes_trajectory_and_hamiltonian(tmp_path, capsys):
    out = tmp_path / "run.csv"
    argv = ["simulate", "--T", "0.6", "--n", "1", "--A0", "3.7", "--t-end", "2",
            "--max-step", "1e-3", "--sample-dt", "0.1", "--out", str(out)]
    assert main(argv) == 0
    trajectory = read_table(out)
    assert trajectory["schema"] == "delay-duffing/trajectory v1"
    assert trajectory["columns"] == ["t", "x", "xdot", "H"]
    assert float(trajectory["rows"][0][0]) == 0.0
    assert float(trajectory["rows"][-1][0]) == 2.0
    assert trajectory["provenance"]["history"] == "elliptic"
    hamiltonian = read_table(tmp_path / "run_hamiltonian.csv")
    assert hamiltonian["columns"] == ["t", "deviation"]


def test_simulate_rejects_parameter_lists(output_dir, capsys):
    argv = ["simulate", "--T", "0.6", "--n", "1,2", "--A0", "3.7", "--t-end", "1"]
    assert main(argv) == 1
    assert "한 쌍" in capsys.readouterr().err
    assert not (output_dir / "cli.csv").exists()


def test_floquet_saves_hamiltonian_series(output_dir):
    argv = ["floquet", "--T", "0.6", "--n", "1", "--t-end", "20",
            "--max-step", "1e-3", "--sample-dt", "0.05"]
    # 기울기 적합 성공 여부와 무관하게 편차 시계열은 먼저 저장된다
    main(argv)
    table = read_table(output_dir / "cli_T0.6_n1_hamiltonian.csv")
    assert table["columns"] == ["t", "deviation"]
    assert float(table["rows"][-1][0]) == pytest.approx(20.0)
    assert table["provenance"]["n"] == "1"


def test_scenario_file_drives_command(output_dir, tmp_path):
    config = tmp_path / "s.yaml"
    config.write_text("defaults:\n  b: 1.0\nshort:\n  T: 0.3\n  n: 11\n", encoding="utf-8")
    assert main(["classify", "--config", str(config), "--scenario", "short"]) == 0
    assert (output_dir / "short_classify.csv").exists()
    assert main(["classify", "--scenario", "short"]) == 1


def test_characteristic_command(output_dir):
    assert main(["characteristic", "--T", "0.6", "--n", "1"]) == 0
    table = read_table(output_dir / "cli_characteristic.csv")
    assert table["columns"] == ["T", "n", "epsilon", "mu_re", "mu_im", "sigma_abs", "verdict", "classify"]
    row = table["rows"][0]
    assert row[6] == "stable"
    assert row[7] == "stable"


def test_verify_detects_injected_fault():
    results = {r.name: r for r in run_checks("p-star")}
    assert not results["에너지 적분 항등식"].passed
    assert results["상수 p*, T_crit"].passed


@pytest.mark.slow
def test_verify_passes_cleanly(capsys):
    assert main(["verify"]) == 0
    assert "8/8 통과" in capsys.readouterr().out
