"""Runnable experiment descriptions.

A scenario bundles the plant, pack, controller, and timing parameters.
Two builtin scenarios ship embedded: cc_50 (pack at 50% SoC, constant
current test) and cv_90 (pack at 90% SoC, constant voltage test).  On
disk a scenario is one self-describing JSON document; the schema is
documented in the README.
"""

import json
from dataclasses import dataclass, field

from .battery import CellParams, PackConfig
from .control import (
    ControllerConfig,
    PidConfig,
    SupervisorConfig,
    _pid_from_obj,
    _pid_to_obj,
    default_current_pid,
    default_supervisor,
    default_voltage_pid,
)
from .converter import ConverterParams, PrechargeConfig, SourceParams
from .errors import ConfigError


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    initial_soc: float
    duration: float
    dt_plant: float
    dt_ctrl: float
    source: SourceParams = field(default_factory=SourceParams)
    converter: ConverterParams = field(default_factory=ConverterParams)
    cell: CellParams = field(default_factory=CellParams)
    pack: PackConfig = field(default_factory=PackConfig)
    precharge: PrechargeConfig = field(default_factory=PrechargeConfig)
    supervisor: SupervisorConfig = field(default_factory=default_supervisor)
    voltage_pid: PidConfig = field(default_factory=default_voltage_pid)
    current_pid: PidConfig = field(default_factory=default_current_pid)
    transport: str = "inproc"
    tcp_address: str = ""
    initial_v_out: float = None  # None means start at the source voltage

    def __post_init__(self):
        if not 0.0 <= self.initial_soc <= 1.0:
            raise ConfigError(f"initial_soc {self.initial_soc} outside [0, 1]")
        if self.duration < 0.0:
            raise ConfigError("duration must be nonnegative")
        if self.dt_plant <= 0.0 or self.dt_ctrl <= 0.0:
            raise ConfigError("dt_plant and dt_ctrl must be positive")
        ratio = self.dt_ctrl / self.dt_plant
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, abs(ratio)):
            raise ConfigError(
                f"dt_ctrl/dt_plant must be a positive integer, got {ratio!r}"
            )
        if self.transport not in ("inproc", "tcp"):
            raise ConfigError(f"unknown transport {self.transport!r}")
        if self.pack.pack_resistance(self.cell) <= 0.0:
            raise ConfigError("pack resistance must be positive for battery coupling")
        for label, pid in (("voltage_pid", self.voltage_pid), ("current_pid", self.current_pid)):
            if (pid.duty_min, pid.duty_max) != (self.converter.duty_min, self.converter.duty_max):
                raise ConfigError(f"{label} duty bounds must match the converter's")

    @property
    def tick_ratio(self) -> int:
        return round(self.dt_ctrl / self.dt_plant)

    @property
    def controller_config(self) -> ControllerConfig:
        return ControllerConfig(
            voltage_pid=self.voltage_pid,
            current_pid=self.current_pid,
            supervisor=self.supervisor,
        )


def builtin_cc_50() -> ScenarioConfig:
    """CC test: pack at 50% SoC, charge at 23 A after precharge to 400 V.

    The precharge voltage-match window is wide (80 V) because the
    controller regulates the output to the 400 V reference while the pack
    rests at 345.6 V; the relay therefore closes on the timer once the
    output has stabilized, and the charger absorbs the connection dump.
    """
    return ScenarioConfig(
        name="cc_50",
        initial_soc=0.5,
        duration=0.3,
        dt_plant=1e-5,
        dt_ctrl=1e-4,
        precharge=PrechargeConfig(t_min=0.2, v_match_tolerance=80.0),
    )


def builtin_cv_90() -> ScenarioConfig:
    """CV test: pack at 90% SoC, ceiling binds at once and the current tapers."""
    return ScenarioConfig(
        name="cv_90",
        initial_soc=0.9,
        duration=0.5,
        dt_plant=1e-5,
        dt_ctrl=1e-4,
        precharge=PrechargeConfig(t_min=0.2, v_match_tolerance=80.0),
    )


BUILTIN_SCENARIOS = {"cc_50": builtin_cc_50, "cv_90": builtin_cv_90}


def scenario_to_obj(cfg: ScenarioConfig) -> dict:
    """Plain-object form of a scenario (the on-disk JSON schema)."""
    return {
        "name": cfg.name,
        "initial_soc": float(cfg.initial_soc),
        "duration": float(cfg.duration),
        "dt_plant": float(cfg.dt_plant),
        "dt_ctrl": float(cfg.dt_ctrl),
        "source": {
            "v_source": float(cfg.source.v_source),
            "r_internal": float(cfg.source.r_internal),
        },
        "converter": {
            "inductance": float(cfg.converter.inductance),
            "capacitance": float(cfg.converter.capacitance),
            "duty_min": float(cfg.converter.duty_min),
            "duty_max": float(cfg.converter.duty_max),
        },
        "cell": {
            "capacity_ah": float(cfg.cell.capacity_ah),
            "v_max": float(cfg.cell.v_max),
            "v_cutoff": float(cfg.cell.v_cutoff),
            "v_nominal": float(cfg.cell.v_nominal),
            "r_cell": float(cfg.cell.r_cell),
        },
        "pack": {"n_series": cfg.pack.n_series, "n_parallel": cfg.pack.n_parallel},
        "precharge": {
            "t_min": float(cfg.precharge.t_min),
            "v_match_tolerance": float(cfg.precharge.v_match_tolerance),
        },
        "supervisor": {
            "i_cc_ref": float(cfg.supervisor.i_cc_ref),
            "v_cv_ref": float(cfg.supervisor.v_cv_ref),
            "cv_entry_fraction": float(cfg.supervisor.cv_entry_fraction),
            "i_terminate": float(cfg.supervisor.i_terminate),
        },
        "voltage_pid": _pid_to_obj(cfg.voltage_pid),
        "current_pid": _pid_to_obj(cfg.current_pid),
        "transport": cfg.transport,
        "tcp_address": cfg.tcp_address,
        "initial_v_out": None if cfg.initial_v_out is None else float(cfg.initial_v_out),
    }


def scenario_from_obj(obj) -> ScenarioConfig:
    """Parse the on-disk JSON schema back into a ScenarioConfig."""
    try:
        src = obj.get("source", {})
        conv = obj.get("converter", {})
        cell = obj.get("cell", {})
        pack = obj.get("pack", {})
        pre = obj.get("precharge", {})
        sup = obj.get("supervisor", {})
        initial_v_out = obj.get("initial_v_out")
        return ScenarioConfig(
            name=str(obj["name"]),
            initial_soc=float(obj["initial_soc"]),
            duration=float(obj["duration"]),
            dt_plant=float(obj["dt_plant"]),
            dt_ctrl=float(obj["dt_ctrl"]),
            source=SourceParams(**{k: float(v) for k, v in src.items()}),
            converter=ConverterParams(**{k: float(v) for k, v in conv.items()}),
            cell=CellParams(**{k: float(v) for k, v in cell.items()}),
            pack=PackConfig(**{k: int(v) for k, v in pack.items()}),
            precharge=PrechargeConfig(**{k: float(v) for k, v in pre.items()}),
            supervisor=SupervisorConfig(**{k: float(v) for k, v in sup.items()}),
            voltage_pid=(
                _pid_from_obj(obj["voltage_pid"])
                if "voltage_pid" in obj
                else default_voltage_pid()
            ),
            current_pid=(
                _pid_from_obj(obj["current_pid"])
                if "current_pid" in obj
                else default_current_pid()
            ),
            transport=str(obj.get("transport", "inproc")),
            tcp_address=str(obj.get("tcp_address", "")),
            initial_v_out=None if initial_v_out is None else float(initial_v_out),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario document: {exc}") from exc


def load_scenario(name_or_path) -> ScenarioConfig:
    """Resolve a builtin scenario name or parse a scenario JSON file."""
    key = str(name_or_path)
    if key in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[key]()
    try:
        with open(name_or_path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(
            f"{key!r} is neither a builtin scenario ({', '.join(sorted(BUILTIN_SCENARIOS))}) "
            "nor a readable file"
        ) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {key!r} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"scenario file {key!r} must hold a JSON object")
    return scenario_from_obj(obj)


def save_scenario(cfg: ScenarioConfig, path):
    """Write a scenario as an indented JSON document."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_obj(cfg), fh, indent=2, allow_nan=False)
        fh.write("\n")
