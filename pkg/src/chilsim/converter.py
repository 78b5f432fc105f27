"""Averaged boost-converter plant with source resistance and precharge relay.

The converter is the two-state averaged model

    di/dt = (v_source - r_internal*i - (1 - duty)*v_out) / L
    dv/dt = ((1 - duty)*i - i_load) / C

integrated with classical fixed-step RK4.  Inductor current is floored at
zero after each step (input diode).  The relay couples the output node to
the battery pack; it closes once the precharge conditions hold and never
reopens within a scenario.
"""

import math
from dataclasses import dataclass, replace

from .errors import SimulationDiverged


@dataclass(frozen=True)
class SourceParams:
    """DC source feeding the converter."""

    v_source: float = 300.0
    r_internal: float = 0.25

    def __post_init__(self):
        if self.v_source <= 0:
            raise ValueError("v_source must be positive")
        if self.r_internal < 0:
            raise ValueError("r_internal must be nonnegative")


@dataclass(frozen=True)
class ConverterParams:
    """Passives and duty limits of the averaged boost stage.

    The defaults keep the source-side LC near critical damping (about
    zeta = 0.96 with the 0.25 ohm source), which is what lets the charger
    reach the 400 V ceiling quickly without trapping overshoot on the
    unloaded output node.  The duty ceiling sits just above the 300 to
    400 V design-point duty (0.2697 at 23 A), standard runaway protection
    for a boost stage.
    """

    inductance: float = 10e-6
    capacitance: float = 470e-6
    duty_min: float = 0.0
    duty_max: float = 0.27

    def __post_init__(self):
        if self.inductance <= 0 or self.capacitance <= 0:
            raise ValueError("inductance and capacitance must be positive")
        if not (0.0 <= self.duty_min < self.duty_max < 1.0):
            raise ValueError("duty limits must satisfy 0 <= duty_min < duty_max < 1")


@dataclass(frozen=True)
class ConverterState:
    """Integrated plant state at simulation time t."""

    i_inductor: float = 0.0
    v_out: float = 0.0
    relay_closed: bool = False
    t: float = 0.0


def converter_derivatives(
    state: ConverterState,
    duty: float,
    i_load: float,
    cp: ConverterParams,
    sp: SourceParams,
):
    """Continuous-time derivatives (di/dt, dv/dt) of the averaged model."""
    if not (
        math.isfinite(state.i_inductor)
        and math.isfinite(state.v_out)
        and math.isfinite(duty)
        and math.isfinite(i_load)
    ):
        raise ValueError("non-finite input to converter model")
    if not 0.0 <= duty < 1.0:
        raise ValueError(f"duty {duty} outside [0, 1)")
    omd = 1.0 - duty
    di = (sp.v_source - sp.r_internal * state.i_inductor - omd * state.v_out) / cp.inductance
    dv = (omd * state.i_inductor - i_load) / cp.capacitance
    return di, dv


def integrate_step(
    state: ConverterState,
    duty: float,
    i_load: float,
    dt: float,
    cp: ConverterParams,
    sp: SourceParams,
    step_index: int = 0,
) -> ConverterState:
    """One RK4 step with duty and i_load held constant (zero-order hold).

    The arithmetic here is the reference for the compiled and pure stepping
    kernels: same expressions, same evaluation order, bit-identical results.
    """
    i0 = state.i_inductor
    v0 = state.v_out
    omd = 1.0 - duty
    vs = sp.v_source
    ri = sp.r_internal
    li = cp.inductance
    ca = cp.capacitance

    k1i = (vs - ri * i0 - omd * v0) / li
    k1v = (omd * i0 - i_load) / ca
    i1 = i0 + 0.5 * dt * k1i
    v1 = v0 + 0.5 * dt * k1v
    k2i = (vs - ri * i1 - omd * v1) / li
    k2v = (omd * i1 - i_load) / ca
    i2 = i0 + 0.5 * dt * k2i
    v2 = v0 + 0.5 * dt * k2v
    k3i = (vs - ri * i2 - omd * v2) / li
    k3v = (omd * i2 - i_load) / ca
    i3 = i0 + dt * k3i
    v3 = v0 + dt * k3v
    k4i = (vs - ri * i3 - omd * v3) / li
    k4v = (omd * i3 - i_load) / ca

    i_new = i0 + dt * (k1i + 2.0 * k2i + 2.0 * k3i + k4i) / 6.0
    v_new = v0 + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
    if not (math.isfinite(i_new) and math.isfinite(v_new)):
        raise SimulationDiverged(step_index, "dt too large for the chosen L, C")
    if i_new < 0.0:
        i_new = 0.0
    return replace(state, i_inductor=i_new, v_out=v_new, t=state.t + dt)


@dataclass(frozen=True)
class PrechargeConfig:
    """Relay-closing policy: minimum hold-off time plus voltage match window."""

    t_min: float = 0.2
    v_match_tolerance: float = 5.0

    def __post_init__(self):
        if self.t_min < 0 or self.v_match_tolerance < 0:
            raise ValueError("precharge thresholds must be nonnegative")


def precharge_supervisor(
    state: ConverterState, v_pack_rest: float, cfg: PrechargeConfig
) -> bool:
    """True when the relay should close; called only while it is still open."""
    return state.t >= cfg.t_min and abs(state.v_out - v_pack_rest) <= cfg.v_match_tolerance
