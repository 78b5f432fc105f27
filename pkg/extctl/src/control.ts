/**
 * Gain-scheduled PID with CC-CV supervision.
 *
 * This mirrors the plant package's controller arithmetic operation for
 * operation, in the same order, on 64-bit floats only (+, -, *, /, and
 * comparisons), so the command stream is bit-identical to the in-process
 * reference controller given the same measurement stream.
 */
import { LoopConfig, Meas, PidSettings, SchedulePoints, SupervisorSettings } from "./wire.js";

export type Mode = "PRECHARGE" | "CC" | "CV" | "DONE";

export interface PidState {
  integral: number;
  prevError: number;
  lastOutput: number;
}

export interface ControllerState {
  mode: Mode;
  pid: PidState | null;
  tOp: number;
  lastSeq: number;
}

export function freshState(): ControllerState {
  return { mode: "PRECHARGE", pid: null, tOp: 0.0, lastSeq: -1 };
}

export function scheduleGain(error: number, sched: SchedulePoints): number {
  const a = error >= 0.0 ? error : -error;
  const bps = sched.points;
  const n = bps.length;
  let g: number;
  if (n === 1) {
    g = bps[0][1];
  } else {
    let j = 0;
    while (j < n - 2 && a > bps[j + 1][0]) {
      j += 1;
    }
    const xl = bps[j][0];
    const gl = bps[j][1];
    const xh = bps[j + 1][0];
    const gh = bps[j + 1][1];
    g = gl + (gh - gl) * ((a - xl) / (xh - xl));
  }
  if (g < sched.floor) {
    g = sched.floor;
  } else if (g > sched.ceiling) {
    g = sched.ceiling;
  }
  return g;
}

export function pidStep(
  error: number,
  st: PidState,
  cfg: PidSettings,
  dt: number,
): [number, PidState] {
  const eN = error / cfg.scale;
  const kp = scheduleGain(error, cfg.kp);
  const ki = scheduleGain(error, cfg.ki);
  const kd = scheduleGain(error, cfg.kd);
  const saturatedHi = st.lastOutput >= cfg.dutyMax && error > 0.0;
  const saturatedLo = st.lastOutput <= cfg.dutyMin && error < 0.0;
  let integral: number;
  if (saturatedHi || saturatedLo) {
    integral = st.integral;
  } else {
    integral = st.integral + eN * dt;
  }
  const prevEN = st.prevError / cfg.scale;
  const u = kp * eN + ki * integral + kd * ((eN - prevEN) / dt);
  let duty: number;
  if (u < cfg.dutyMin) {
    duty = cfg.dutyMin;
  } else if (u > cfg.dutyMax) {
    duty = cfg.dutyMax;
  } else {
    duty = u;
  }
  return [duty, { integral, prevError: error, lastOutput: duty }];
}

export function supervisorStep(
  vBatt: number,
  iBatt: number,
  mode: Mode,
  relayClosed: boolean,
  sup: SupervisorSettings,
): [Mode, "voltage" | "current", number] {
  const vCeiling = sup.cvEntryFraction * sup.vCvRef;
  if (mode === "PRECHARGE" && relayClosed) {
    mode = "CC";
  }
  if (mode === "CC" && vBatt >= vCeiling && iBatt <= sup.iCcRef) {
    mode = "CV";
  }
  if (mode === "CV" && iBatt <= sup.iTerminate && vBatt >= vCeiling) {
    mode = "DONE";
  }
  if (mode === "CC") {
    return [mode, "current", sup.iCcRef];
  }
  return [mode, "voltage", sup.vCvRef];
}

export interface TickOutput {
  seq: number;
  mode: Mode;
  top: number;
  duty: number;
}

export function controllerTick(
  meas: Meas,
  ctl: ControllerState,
  cfg: LoopConfig,
): [TickOutput, ControllerState] {
  if (meas.seq !== ctl.lastSeq + 1) {
    throw new Error(`measurement seq ${meas.seq} does not follow ${ctl.lastSeq}`);
  }
  const [mode, loop, reference] = supervisorStep(
    meas.vs,
    meas.is,
    ctl.mode,
    meas.relay,
    cfg.supervisor,
  );
  let measured: number;
  let pidCfg: PidSettings;
  if (loop === "voltage") {
    measured = meas.vs;
    pidCfg = cfg.voltagePid;
  } else {
    measured = meas.is;
    pidCfg = cfg.currentPid;
  }
  const error = reference - measured;
  let pid = ctl.pid;
  if (pid === null || mode !== ctl.mode) {
    const last = pid === null ? 0.0 : pid.lastOutput;
    const ki = scheduleGain(error, pidCfg.ki);
    const integral = ki > 0.0 ? last / ki : 0.0;
    pid = { integral, prevError: error, lastOutput: last };
  }
  const [duty, nextPid] = pidStep(error, pid, pidCfg, cfg.dtCtrl);
  const tOp = ctl.tOp + cfg.dtCtrl;
  return [
    { seq: meas.seq, mode, top: tOp, duty },
    { mode, pid: nextPid, tOp, lastSeq: meas.seq },
  ];
}
