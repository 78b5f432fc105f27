"""Gain-scheduled PID with a CC-CV charging supervisor.

All three PID branches look their gain up in a breakpoint schedule over
|error| (piecewise linear, clamped to the schedule's floor/ceiling, gains
confined to [0, 1]).  The supervisor walks PRECHARGE -> CC -> CV -> DONE,
latched one-way; transitions may cascade within a single tick.

Every arithmetic step in this module uses only +, -, *, / and comparisons
on 64-bit floats in a fixed order, so an external controller written in a
different runtime can reproduce the command stream bit-exactly.
"""

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, ProtocolOrderError
from .wire import CommandFrame, MeasurementFrame


class ChargeMode(str, Enum):
    PRECHARGE = "PRECHARGE"
    CC = "CC"
    CV = "CV"
    DONE = "DONE"


VOLTAGE_LOOP = "voltage"
CURRENT_LOOP = "current"


@dataclass(frozen=True)
class GainSchedule:
    """Breakpoint map |error| -> gain, clamped to [gain_floor, gain_ceiling]."""

    breakpoints: tuple  # ((abs_error, gain), ...) strictly increasing abs_error
    gain_floor: float = 0.0
    gain_ceiling: float = 1.0

    def __post_init__(self):
        if not self.breakpoints:
            raise ValueError("schedule needs at least one breakpoint")
        xs = [x for x, _ in self.breakpoints]
        gs = [g for _, g in self.breakpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint abs_error values must be strictly increasing")
        if any(b < a for a, b in zip(gs, gs[1:])):
            raise ValueError("breakpoint gains must be nondecreasing")
        if not (0.0 <= self.gain_floor <= min(gs) and max(gs) <= self.gain_ceiling <= 1.0):
            raise ValueError("gains must satisfy 0 <= floor <= gains <= ceiling <= 1")


def flat_schedule(gain: float) -> GainSchedule:
    """A constant schedule (same gain at every error)."""
    return GainSchedule(breakpoints=((1.0, gain),), gain_floor=gain, gain_ceiling=gain)


def schedule_gain(error: float, sched: GainSchedule) -> float:
    """Look up the gain for an error; symmetric in sign, clamped to range.

    Between breakpoints the gain is linearly interpolated; outside the
    breakpoint span the nearest segment's line is extended and the clamp
    takes over (so the gain below the first breakpoint falls to the floor
    and above the last rises to the ceiling).
    """
    a = error if error >= 0.0 else -error
    bps = sched.breakpoints
    n = len(bps)
    if n == 1:
        g = bps[0][1]
    else:
        # pick the segment: first for a below the span, last for above
        j = 0
        while j < n - 2 and a > bps[j + 1][0]:
            j += 1
        xl, gl = bps[j]
        xh, gh = bps[j + 1]
        g = gl + (gh - gl) * ((a - xl) / (xh - xl))
    if g < sched.gain_floor:
        g = sched.gain_floor
    elif g > sched.gain_ceiling:
        g = sched.gain_ceiling
    return g


@dataclass(frozen=True)
class PidConfig:
    """Per-loop PID configuration.

    reference_scale divides the error before the PID sum so a gain of 1
    maps loop units onto the [0, 1) duty range; the schedules themselves
    are evaluated on the raw error (volts or amperes).
    """

    kp_schedule: GainSchedule
    ki_schedule: GainSchedule
    kd_schedule: GainSchedule
    reference_scale: float
    duty_min: float = 0.0
    duty_max: float = 0.95

    def __post_init__(self):
        if self.reference_scale <= 0:
            raise ValueError("reference_scale must be positive")
        if not (0.0 <= self.duty_min < self.duty_max < 1.0):
            raise ValueError("duty limits must satisfy 0 <= duty_min < duty_max < 1")


@dataclass(frozen=True)
class PidState:
    """Integrator and derivative memory carried between ticks."""

    integral: float = 0.0  # of normalized error, in seconds
    prev_error: float = 0.0  # loop units
    last_output: float = 0.0


def pid_step(error: float, st: PidState, cfg: PidConfig, dt: float):
    """One PID evaluation; returns (duty command, new state).

    Integration is conditional (anti-windup): it is skipped while the last
    output sat on a duty limit and the error pushes further into it.
    """
    if dt <= 0:
        raise ConfigError("controller tick period must be positive")
    e_n = error / cfg.reference_scale
    kp = schedule_gain(error, cfg.kp_schedule)
    ki = schedule_gain(error, cfg.ki_schedule)
    kd = schedule_gain(error, cfg.kd_schedule)
    saturated_hi = st.last_output >= cfg.duty_max and error > 0.0
    saturated_lo = st.last_output <= cfg.duty_min and error < 0.0
    if saturated_hi or saturated_lo:
        integral = st.integral
    else:
        integral = st.integral + e_n * dt
    prev_e_n = st.prev_error / cfg.reference_scale
    u = kp * e_n + ki * integral + kd * ((e_n - prev_e_n) / dt)
    if u < cfg.duty_min:
        duty = cfg.duty_min
    elif u > cfg.duty_max:
        duty = cfg.duty_max
    else:
        duty = u
    return duty, PidState(integral=integral, prev_error=error, last_output=duty)


@dataclass(frozen=True)
class SupervisorConfig:
    """CC-CV policy: current setpoint, voltage ceiling, entry and cutoff."""

    i_cc_ref: float = 23.0
    v_cv_ref: float = 400.0
    cv_entry_fraction: float = 1.0
    i_terminate: float = 0.135  # C/20 for the 2.7 Ah cell

    def __post_init__(self):
        if not 0.0 < self.cv_entry_fraction <= 1.0:
            raise ValueError("cv_entry_fraction must be in (0, 1]")
        if not 0.0 < self.i_terminate < self.i_cc_ref:
            raise ValueError("i_terminate must be in (0, i_cc_ref)")


def supervisor_step(
    v_batt: float,
    i_batt: float,
    mode: ChargeMode,
    relay_closed: bool,
    sup: SupervisorConfig,
):
    """Advance the charge mode and pick the active loop and its reference.

    Transitions are one-way and may cascade in a single call (a relay that
    closes with the pack already at the ceiling goes straight to CV).  CV
    entry and DONE both require the voltage ceiling to be engaged, and CV
    entry additionally requires the current limiter to be inactive; that
    distinguishes the ceiling binding from the relay-closure dump and the
    CV-entry current dip.
    """
    v_ceiling = sup.cv_entry_fraction * sup.v_cv_ref
    if mode is ChargeMode.PRECHARGE and relay_closed:
        mode = ChargeMode.CC
    if mode is ChargeMode.CC and v_batt >= v_ceiling and i_batt <= sup.i_cc_ref:
        mode = ChargeMode.CV
    if mode is ChargeMode.CV and i_batt <= sup.i_terminate and v_batt >= v_ceiling:
        mode = ChargeMode.DONE
    if mode is ChargeMode.CC:
        return mode, CURRENT_LOOP, sup.i_cc_ref
    return mode, VOLTAGE_LOOP, sup.v_cv_ref


@dataclass(frozen=True)
class ControllerConfig:
    """Everything the charging controller needs: two loops plus supervisor."""

    voltage_pid: PidConfig
    current_pid: PidConfig
    supervisor: SupervisorConfig


@dataclass(frozen=True)
class ControllerState:
    """Controller memory between ticks; starts fresh at PRECHARGE."""

    mode: ChargeMode = ChargeMode.PRECHARGE
    pid: PidState = None  # None until the first tick initializes it
    t_op: float = 0.0
    last_seq: int = -1


def controller_tick(
    meas: MeasurementFrame, ctl: ControllerState, cfg: ControllerConfig, dt: float
):
    """Consume one measurement frame and produce the command frame.

    Runs the supervisor, evaluates the active loop's PID on its error, and
    reinitializes the integrator bumplessly on the first tick and on every
    mode transition (the integral term alone reproduces the previous duty,
    and the derivative memory is seeded with the current error).
    """
    if meas.seq != ctl.last_seq + 1:
        raise ProtocolOrderError(
            f"measurement seq {meas.seq} does not follow {ctl.last_seq}"
        )
    mode, loop, reference = supervisor_step(
        meas.v_secondary, meas.i_secondary, ctl.mode, meas.relay_closed, cfg.supervisor
    )
    if loop == VOLTAGE_LOOP:
        measured = meas.v_secondary
        pid_cfg = cfg.voltage_pid
    else:
        measured = meas.i_secondary
        pid_cfg = cfg.current_pid
    error = reference - measured
    pid = ctl.pid
    if pid is None or mode is not ctl.mode:
        last = 0.0 if pid is None else pid.last_output
        ki = schedule_gain(error, pid_cfg.ki_schedule)
        integral = last / ki if ki > 0.0 else 0.0
        pid = PidState(integral=integral, prev_error=error, last_output=last)
    duty, pid = pid_step(error, pid, pid_cfg, dt)
    t_op = ctl.t_op + dt
    cmd = CommandFrame(
        seq=meas.seq,
        ready=True,
        running_mode=mode.value,
        time_of_operation=t_op,
        duty=duty,
    )
    return cmd, ControllerState(mode=mode, pid=pid, t_op=t_op, last_seq=meas.seq)


def active_kp(meas: MeasurementFrame, mode: ChargeMode, cfg: ControllerConfig) -> float:
    """Proportional gain the controller used for this frame (for tracing)."""
    _, loop, reference = supervisor_step(
        meas.v_secondary, meas.i_secondary, mode, meas.relay_closed, cfg.supervisor
    )
    if loop == VOLTAGE_LOOP:
        return schedule_gain(reference - meas.v_secondary, cfg.voltage_pid.kp_schedule)
    return schedule_gain(reference - meas.i_secondary, cfg.current_pid.kp_schedule)


def default_voltage_pid(duty_max: float = 0.27) -> PidConfig:
    """Voltage-loop tuning used by the builtin scenarios.

    The kp schedule carries the published operating points (error 20 ->
    gain 1.0, error 10 -> gain 0.5); the extra breakpoint at 3 V flattens
    the gain to the floor near zero error, which keeps the tick-discrete
    loop from limit-cycling around the ceiling.  ki is flat; kd is zero.
    """
    return PidConfig(
        kp_schedule=GainSchedule(((3.0, 0.015), (10.0, 0.5), (20.0, 1.0)), 0.015, 1.0),
        ki_schedule=flat_schedule(1.0),
        kd_schedule=flat_schedule(0.0),
        reference_scale=8.0,
        duty_min=0.0,
        duty_max=duty_max,
    )


def default_current_pid(duty_max: float = 0.27) -> PidConfig:
    """Current-loop tuning used by the builtin scenarios.

    Breakpoints sit at 2.5% and 5% of the 23 A setpoint, keeping the 2:1
    shape of the voltage schedule; the absolute gains and the reference
    scale are sized for a stable crossover at the 10 kHz tick rate with an
    integrator fast enough to settle the relay-closure dump in a few ms.
    """
    return PidConfig(
        kp_schedule=GainSchedule(((0.575, 0.00035), (1.15, 0.0007)), 0.00007, 0.0007),
        ki_schedule=flat_schedule(1.0),
        kd_schedule=flat_schedule(0.0),
        reference_scale=0.155,
        duty_min=0.0,
        duty_max=duty_max,
    )


def default_supervisor() -> SupervisorConfig:
    return SupervisorConfig()


def _schedule_to_obj(s: GainSchedule) -> dict:
    return {
        "points": [[float(x), float(g)] for x, g in s.breakpoints],
        "floor": float(s.gain_floor),
        "ceiling": float(s.gain_ceiling),
    }


def _pid_to_obj(p: PidConfig) -> dict:
    return {
        "kp": _schedule_to_obj(p.kp_schedule),
        "ki": _schedule_to_obj(p.ki_schedule),
        "kd": _schedule_to_obj(p.kd_schedule),
        "scale": float(p.reference_scale),
        "duty_min": float(p.duty_min),
        "duty_max": float(p.duty_max),
    }


def config_to_obj(cfg: ControllerConfig, dt_ctrl: float) -> dict:
    """Loop configuration as the plain object carried in the plant hello.

    Key order is part of the wire contract: the config digest is computed
    over this object's canonical serialization.
    """
    sup = cfg.supervisor
    return {
        "dt_ctrl": float(dt_ctrl),
        "supervisor": {
            "i_cc_ref": float(sup.i_cc_ref),
            "v_cv_ref": float(sup.v_cv_ref),
            "cv_entry_fraction": float(sup.cv_entry_fraction),
            "i_terminate": float(sup.i_terminate),
        },
        "voltage_pid": _pid_to_obj(cfg.voltage_pid),
        "current_pid": _pid_to_obj(cfg.current_pid),
    }


def _schedule_from_obj(obj) -> GainSchedule:
    try:
        points = tuple((float(x), float(g)) for x, g in obj["points"])
        return GainSchedule(points, float(obj["floor"]), float(obj["ceiling"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad gain schedule in hello config: {exc}") from exc


def _pid_from_obj(obj) -> PidConfig:
    try:
        return PidConfig(
            kp_schedule=_schedule_from_obj(obj["kp"]),
            ki_schedule=_schedule_from_obj(obj["ki"]),
            kd_schedule=_schedule_from_obj(obj["kd"]),
            reference_scale=float(obj["scale"]),
            duty_min=float(obj["duty_min"]),
            duty_max=float(obj["duty_max"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad pid config in hello config: {exc}") from exc


def config_from_obj(obj):
    """Rebuild (ControllerConfig, dt_ctrl) from a hello config object."""
    try:
        sup_obj = obj["supervisor"]
        sup = SupervisorConfig(
            i_cc_ref=float(sup_obj["i_cc_ref"]),
            v_cv_ref=float(sup_obj["v_cv_ref"]),
            cv_entry_fraction=float(sup_obj["cv_entry_fraction"]),
            i_terminate=float(sup_obj["i_terminate"]),
        )
        cfg = ControllerConfig(
            voltage_pid=_pid_from_obj(obj["voltage_pid"]),
            current_pid=_pid_from_obj(obj["current_pid"]),
            supervisor=sup,
        )
        return cfg, float(obj["dt_ctrl"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad hello config: {exc}") from exc
