"""Controller-hardware-in-the-loop co-simulation of a boost battery charger.

A deterministic averaged boost-converter plant charging a 96S1P lithium
pack, driven by a gain-scheduled PID with a CC-CV supervisor.  The
controller runs in-process or as an external process over a lockstep
newline-delimited wire protocol; wall-clock delays and PAUSE heartbeats
never change simulation results.
"""

from .battery import CellParams, PackConfig, PackState, coulomb_step, open_circuit_voltage, pack_terminal_voltage
from .control import (
    ChargeMode,
    ControllerConfig,
    ControllerState,
    GainSchedule,
    PidConfig,
    PidState,
    SupervisorConfig,
    controller_tick,
    pid_step,
    schedule_gain,
    supervisor_step,
)
from .converter import (
    ConverterParams,
    ConverterState,
    PrechargeConfig,
    SourceParams,
    converter_derivatives,
    integrate_step,
    precharge_supervisor,
)
from .engine import KERNEL_NAME
from .metrics import (
    MetricsReport,
    compute_metrics,
    compute_overshoot,
    compute_settling_time,
    compute_stabilization_time,
)
from .runner import TraceRecord, run_scenario
from .scenario import BUILTIN_SCENARIOS, ScenarioConfig, load_scenario
from .traceio import read_trace_csv, write_trace_csv
from .wire import CommandFrame, ControlFrame, HelloFrame, MeasurementFrame, decode_frame, encode_frame

__version__ = "0.1.0"
