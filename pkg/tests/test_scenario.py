import pytest
from dataclasses import replace

from chilsim.control import default_current_pid, default_voltage_pid
from chilsim.converter import ConverterParams
from chilsim.errors import ConfigError
from chilsim.scenario import (
    BUILTIN_SCENARIOS,
    ScenarioConfig,
    builtin_cc_50,
    builtin_cv_90,
    load_scenario,
    save_scenario,
    scenario_from_obj,
    scenario_to_obj,
)


def test_builtins_resolve_by_name():
    for name in BUILTIN_SCENARIOS:
        cfg = load_scenario(name)
        assert cfg.name == name


def test_builtin_parameters():
    cc = builtin_cc_50()
    assert cc.initial_soc == 0.5
    assert cc.tick_ratio == 10
    cv = builtin_cv_90()
    assert cv.initial_soc == 0.9


def test_file_round_trip(tmp_path):
    cfg = builtin_cc_50()
    path = tmp_path / "scenario.json"
    save_scenario(cfg, path)
    loaded = load_scenario(path)
    assert loaded == cfg


def test_obj_round_trip():
    cfg = builtin_cv_90()
    assert scenario_from_obj(scenario_to_obj(cfg)) == cfg


def test_unknown_name_rejected():
    with pytest.raises(ConfigError, match="builtin"):
        load_scenario("nope_42")


def test_bad_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_scenario(path)


def test_tick_ratio_must_be_integer():
    with pytest.raises(ConfigError, match="integer"):
        ScenarioConfig(name="x", initial_soc=0.5, duration=0.1, dt_plant=3e-5, dt_ctrl=1e-4)


def test_duty_bounds_must_match_converter():
    with pytest.raises(ConfigError, match="duty bounds"):
        ScenarioConfig(
            name="x",
            initial_soc=0.5,
            duration=0.1,
            dt_plant=1e-5,
            dt_ctrl=1e-4,
            converter=ConverterParams(duty_max=0.5),
            voltage_pid=default_voltage_pid(0.27),
            current_pid=default_current_pid(0.27),
        )


def test_bad_transport():
    with pytest.raises(ConfigError, match="transport"):
        ScenarioConfig(
            name="x", initial_soc=0.5, duration=0.1, dt_plant=1e-5, dt_ctrl=1e-4,
            transport="carrier-pigeon",
        )


def test_bad_soc():
    with pytest.raises(ConfigError):
        ScenarioConfig(name="x", initial_soc=1.5, duration=0.1, dt_plant=1e-5, dt_ctrl=1e-4)


def test_partial_file_uses_defaults(tmp_path):
    path = tmp_path / "minimal.json"
    path.write_text(
        '{"name": "mini", "initial_soc": 0.4, "duration": 0.01,'
        ' "dt_plant": 1e-5, "dt_ctrl": 1e-4}\n'
    )
    cfg = load_scenario(path)
    assert cfg.name == "mini"
    assert cfg.voltage_pid == default_voltage_pid()
    assert cfg.converter == ConverterParams()
