"""
시나리오 설정 / CSV 입출력 테스트
"""
from pathlib import Path

import pytest
from pydantic import ValidationError

from delay_duffing.core.csv_io import format_value, read_table, write_table
from delay_duffing.core.scenario import (
    ScenarioConfig,
    build_config,
    list_scenarios,
    load_scenario_file,
)

SCENARIO_FILE = Path(__file__).resolve().parent.parent / "scenarios" / "reference.yaml"

YAML_TEXT = """
defaults:
  b: 1.0
  max_step: 1.0e-3
  tol: 1.0e-7
run_a:
  T: 0.6
  n: 1,2
  A0: 3.7
  t-end: 10
run_b:
  T: [0.3, 0.9]
  b: -1.0
"""


@pytest.fixture
def scenario_path(tmp_path):
    path = tmp_path / "scenarios.yaml"
    path.write_text(YAML_TEXT, encoding="utf-8")
    return path


def test_defaults_are_merged_with_section(scenario_path):
    values = load_scenario_file(scenario_path, "run_a")
    config = build_config(values)
    assert config.name == "run_a"
    assert config.T == [0.6]
    assert config.n == [1, 2]
    assert config.initial_amplitude == 3.7
    assert config.t_end == 10.0
    assert config.max_step == 1e-3
    assert config.rtol == 1e-7


def test_section_overrides_defaults(scenario_path):
    config = build_config(load_scenario_file(scenario_path, "run_b"))
    assert config.b == -1.0
    assert config.T == [0.3, 0.9]
    assert config.n == [1]


def test_cli_overrides_file_values(scenario_path):
    values = load_scenario_file(scenario_path, "run_a")
    config = build_config(values, {"T": [0.3], "tol": None, "A0": 4.68})
    assert config.T == [0.3]
    assert config.rtol == 1e-7
    assert config.initial_amplitude == 4.68


def test_unknown_section_is_reported(scenario_path):
    with pytest.raises(ValueError, match="run_c"):
        load_scenario_file(scenario_path, "run_c")
    assert list_scenarios(scenario_path) == ["run_a", "run_b"]


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario_file("does/not/exist.yaml", "run_a")


def test_bundled_scenarios_load():
    names = list_scenarios(SCENARIO_FILE)
    assert "sweep" in names
    for name in names:
        config = build_config(load_scenario_file(SCENARIO_FILE, name))
        assert config.T
        assert config.max_step == 1e-4


@pytest.mark.parametrize("field, value", [("n", "0"), ("T", "-0.3"), ("max_step", 0.0), ("workers", 0)])
def test_invalid_values_are_rejected(field, value):
    with pytest.raises(ValidationError):
        ScenarioConfig(**{field: value})


def test_output_paths(output_dir):
    config = ScenarioConfig(name="demo", T=[0.6])
    assert config.output_path("_amplitude") == output_dir / "demo_amplitude.csv"
    explicit = ScenarioConfig(output="runs/out.csv")
    assert explicit.output_path("") == Path("runs/out.csv")
    assert explicit.output_path("_hamiltonian") == Path("runs/out_hamiltonian.csv")


def test_integrator_options_follow_config():
    options = ScenarioConfig(max_step=1e-3, rtol=1e-8, history_stride=4).integrator_options()
    assert (options.max_step, options.rtol, options.history_stride) == (1e-3, 1e-8, 4)


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(None) == ""
    assert format_value(3) == "3"
    assert format_value(1.0 - 2.0j) == "1-2j"


def test_table_layout(tmp_path):
    path = write_table(tmp_path / "sub" / "t.csv", "amplitude", ["n", "A"],
                       [(1, 6.297211450), (2, 12.30144591494)], {"T": 0.6})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# schema: delay-duffing/amplitude v1"
    assert lines[1] == "# T=0.59999999999999998"
    assert lines[2] == "n,A"
    table = read_table(path)
    assert table["provenance"] == {"T": "0.59999999999999998"}
    assert float(table["rows"][1][1]) == 12.30144591494
