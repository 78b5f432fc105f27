"""Top-level co-simulation loop.

Wires the plant (converter + pack, stepped by the selected kernel) to a
controller endpoint over the lockstep link.  One TraceRecord is appended
per exchange.  The loop terminates at the scenario duration, on a DONE
command, or on an END frame; protocol failures propagate with the trace
collected so far attached to the exception.
"""

import threading
from dataclasses import dataclass

from . import engine
from .battery import PackState, pack_terminal_voltage
from .control import (
    ChargeMode,
    ControllerState,
    active_kp,
    config_from_obj,
    config_to_obj,
    controller_tick,
)
from .converter import ConverterState, precharge_supervisor
from .errors import ChilsimError, MetricsError
from .link import ControllerServer, InprocTransport, PlantLink, should_exchange
from .metrics import compute_metrics
from .scenario import ScenarioConfig
from .wire import (
    EVENT_I_CUTOFF,
    EVENT_RELAY,
    EVENT_V_CEILING,
    MeasurementFrame,
    config_digest,
)

_EVENT_NAMES = {
    engine.EVENT_V_RISE: EVENT_V_CEILING,
    engine.EVENT_I_FALL: EVENT_I_CUTOFF,
}


@dataclass(frozen=True)
class TraceRecord:
    """One exchange: plant measurands plus the command that answered them."""

    t: float
    vp: float
    vs: float
    ip: float
    is_: float
    soc: float
    duty: float
    mode: str
    kp: float


def reference_tick_factory(hello):
    """Build the in-process controller tick from the hello-carried config.

    The reference controller deliberately reads nothing but the handshake,
    exactly like an external controller device would.
    """
    cfg, dt_ctrl = config_from_obj(hello.config)
    box = {"ctl": ControllerState()}

    def tick(meas):
        cmd, box["ctl"] = controller_tick(meas, box["ctl"], cfg, dt_ctrl)
        return cmd

    return tick


class InprocController:
    """Reference controller served from a daemon thread over queue transport."""

    def __init__(self, pause_demo=0, response_timeout=2.0):
        plant_side, ctl_side = InprocTransport.pair()
        self.plant_transport = plant_side
        self.server = ControllerServer(
            ctl_side,
            reference_tick_factory,
            response_timeout=response_timeout,
            pause_demo=pause_demo,
        )
        self._error = None
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self):
        try:
            self.server.serve()
        except BaseException as exc:  # surfaced in finish()
            self._error = exc

    def finish(self, timeout=10.0):
        self._thread.join(timeout)
        if self._error is not None:
            raise self._error


def _coupling_current(v_out, soc, n_series, v_cutoff, ocv_span, r_pack):
    """Pack charging current through the algebraic IR coupling, floored at 0."""
    ocv_pack = n_series * (v_cutoff + ocv_span * soc)
    il = (v_out - ocv_pack) / r_pack
    if il < 0.0:
        il = 0.0
    return il


def run_scenario(cfg: ScenarioConfig, transport=None, response_timeout=2.0):
    """Execute a scenario against a controller endpoint.

    With transport=None an in-process reference controller is spawned;
    otherwise the caller supplies a transport already connected to one
    (e.g. an accepted TCP connection).  Returns (trace, MetricsReport).
    """
    own_controller = None
    if transport is None:
        own_controller = InprocController(response_timeout=response_timeout)
        transport = own_controller.plant_transport

    ratio = cfg.tick_ratio
    n_total = round(cfg.duration / cfg.dt_plant)
    dt = cfg.dt_plant
    sp, cp = cfg.source, cfg.converter
    n_series = float(cfg.pack.n_series)
    v_cutoff = cfg.cell.v_cutoff
    ocv_span = cfg.cell.v_max - cfg.cell.v_cutoff
    r_pack = cfg.pack.pack_resistance(cfg.cell)
    cap_denom = 3600.0 * cfg.cell.capacity_ah * cfg.pack.n_parallel
    v_ceiling = cfg.supervisor.cv_entry_fraction * cfg.supervisor.v_cv_ref
    v_pack_rest = pack_terminal_voltage(
        PackState(soc=cfg.initial_soc), 0.0, cfg.cell, cfg.pack
    )

    i_l = 0.0
    v_out = sp.v_source if cfg.initial_v_out is None else cfg.initial_v_out
    t = 0.0
    soc = cfg.initial_soc
    relay = False
    duty = 0.0
    mode = "PRECHARGE"
    event = None

    ctl_cfg = cfg.controller_config
    config_obj = config_to_obj(ctl_cfg, cfg.dt_ctrl)
    digest = config_digest(config_obj)

    link = PlantLink(transport, response_timeout)
    trace = []
    try:
        link.handshake(cfg.dt_ctrl, config_obj, digest)
        g = 0
        while g < n_total:
            if should_exchange(g, ratio, event):
                if not relay:
                    state = ConverterState(i_l, v_out, relay, t)
                    if precharge_supervisor(state, v_pack_rest, cfg.precharge):
                        relay = True
                        event = EVENT_RELAY
                il_now = (
                    _coupling_current(v_out, soc, n_series, v_cutoff, ocv_span, r_pack)
                    if relay
                    else 0.0
                )
                meas = MeasurementFrame(
                    seq=link.state.next_seq,
                    t_sim=t,
                    v_primary=sp.v_source - sp.r_internal * i_l,
                    v_secondary=v_out,
                    i_primary=i_l,
                    i_secondary=il_now,
                    relay_closed=relay,
                    event=event,
                )
                cmd = link.exchange(meas)
                kp = active_kp(meas, ChargeMode(mode), ctl_cfg)
                trace.append(
                    TraceRecord(
                        t=t,
                        vp=meas.v_primary,
                        vs=v_out,
                        ip=i_l,
                        is_=il_now,
                        soc=soc,
                        duty=cmd.duty,
                        mode=cmd.running_mode,
                        kp=kp,
                    )
                )
                duty = cmd.duty
                mode = cmd.running_mode
                event = None
                if mode == "DONE":
                    break
            next_grid = (g // ratio + 1) * ratio
            block = min(next_grid, n_total) - g
            i_l, v_out, t, soc, steps, ev = engine.step_block(
                i_l,
                v_out,
                t,
                soc,
                duty,
                dt,
                block,
                relay,
                sp.v_source,
                sp.r_internal,
                cp.inductance,
                cp.capacitance,
                n_series,
                v_cutoff,
                ocv_span,
                r_pack,
                cap_denom,
                engine.MODE_CODES[mode],
                v_ceiling,
                cfg.supervisor.i_terminate,
                g,
            )
            g += steps
            event = _EVENT_NAMES.get(ev)
    except ChilsimError as exc:
        exc.partial_trace = trace
        raise
    finally:
        try:
            link.end()
        except Exception:
            pass
        if own_controller is not None:
            own_controller.finish()

    try:
        report = compute_metrics(trace, cfg.supervisor.v_cv_ref, cfg.supervisor.i_cc_ref)
    except MetricsError as exc:
        exc.partial_trace = trace
        raise
    return trace, report
