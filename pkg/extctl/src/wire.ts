/**
 * Frame codec for the lockstep wire protocol.
 *
 * Records are single-line JSON objects with a fixed key order; floats are
 * rendered via pyFloat so encoded lines are byte-identical to the plant
 * side's. See docs/protocol.md in the repository root.
 */
import { createHash } from "node:crypto";
import { pyFloat } from "./pyfloat.js";

export const PROTOCOL_VERSION = 1;

export interface SchedulePoints {
  points: [number, number][];
  floor: number;
  ceiling: number;
}

export interface PidSettings {
  kp: SchedulePoints;
  ki: SchedulePoints;
  kd: SchedulePoints;
  scale: number;
  dutyMin: number;
  dutyMax: number;
}

export interface SupervisorSettings {
  iCcRef: number;
  vCvRef: number;
  cvEntryFraction: number;
  iTerminate: number;
}

export interface LoopConfig {
  dtCtrl: number;
  supervisor: SupervisorSettings;
  voltagePid: PidSettings;
  currentPid: PidSettings;
}

export interface Meas {
  seq: number;
  t: number;
  vp: number;
  vs: number;
  ip: number;
  is: number;
  relay: boolean;
  event: string | null;
}

function asNumber(obj: Record<string, unknown>, field: string): number {
  const v = obj[field];
  if (typeof v !== "number") {
    throw new Error(`field '${field}' must be a number`);
  }
  return v;
}

function asSchedule(raw: unknown): SchedulePoints {
  const obj = raw as Record<string, unknown>;
  const points = (obj.points as [number, number][]).map(
    ([x, g]) => [x, g] as [number, number],
  );
  if (points.length < 1) {
    throw new Error("schedule needs at least one breakpoint");
  }
  return {
    points,
    floor: asNumber(obj, "floor"),
    ceiling: asNumber(obj, "ceiling"),
  };
}

function asPid(raw: unknown): PidSettings {
  const obj = raw as Record<string, unknown>;
  return {
    kp: asSchedule(obj.kp),
    ki: asSchedule(obj.ki),
    kd: asSchedule(obj.kd),
    scale: asNumber(obj, "scale"),
    dutyMin: asNumber(obj, "duty_min"),
    dutyMax: asNumber(obj, "duty_max"),
  };
}

export function parseLoopConfig(raw: unknown): LoopConfig {
  const obj = raw as Record<string, unknown>;
  const sup = obj.supervisor as Record<string, unknown>;
  return {
    dtCtrl: asNumber(obj, "dt_ctrl"),
    supervisor: {
      iCcRef: asNumber(sup, "i_cc_ref"),
      vCvRef: asNumber(sup, "v_cv_ref"),
      cvEntryFraction: asNumber(sup, "cv_entry_fraction"),
      iTerminate: asNumber(sup, "i_terminate"),
    },
    voltagePid: asPid(obj.voltage_pid),
    currentPid: asPid(obj.current_pid),
  };
}

function scheduleJson(s: SchedulePoints): string {
  const pts = s.points.map(([x, g]) => `[${pyFloat(x)},${pyFloat(g)}]`).join(",");
  return `{"points":[${pts}],"floor":${pyFloat(s.floor)},"ceiling":${pyFloat(s.ceiling)}}`;
}

function pidJson(p: PidSettings): string {
  return (
    `{"kp":${scheduleJson(p.kp)},"ki":${scheduleJson(p.ki)},"kd":${scheduleJson(p.kd)},` +
    `"scale":${pyFloat(p.scale)},"duty_min":${pyFloat(p.dutyMin)},"duty_max":${pyFloat(p.dutyMax)}}`
  );
}

/** Canonical serialization of the hello config; the digest input. */
export function canonicalConfigJson(cfg: LoopConfig): string {
  const s = cfg.supervisor;
  return (
    `{"dt_ctrl":${pyFloat(cfg.dtCtrl)},` +
    `"supervisor":{"i_cc_ref":${pyFloat(s.iCcRef)},"v_cv_ref":${pyFloat(s.vCvRef)},` +
    `"cv_entry_fraction":${pyFloat(s.cvEntryFraction)},"i_terminate":${pyFloat(s.iTerminate)}},` +
    `"voltage_pid":${pidJson(cfg.voltagePid)},` +
    `"current_pid":${pidJson(cfg.currentPid)}}`
  );
}

export function configDigest(cfg: LoopConfig): string {
  return createHash("sha256").update(canonicalConfigJson(cfg), "utf8").digest("hex");
}

export function parseMeas(obj: Record<string, unknown>): Meas {
  const seq = obj.seq;
  if (typeof seq !== "number" || !Number.isInteger(seq)) {
    throw new Error("missing required field 'seq'");
  }
  const event = obj.event;
  return {
    seq,
    t: asNumber(obj, "t"),
    vp: asNumber(obj, "vp"),
    vs: asNumber(obj, "vs"),
    ip: asNumber(obj, "ip"),
    is: asNumber(obj, "is"),
    relay: Boolean(obj.relay),
    event: typeof event === "string" ? event : null,
  };
}

export function encodeCmd(
  seq: number,
  mode: string,
  top: number,
  duty: number,
): string {
  return (
    `{"type":"cmd","seq":${seq},"ready":true,"mode":"${mode}",` +
    `"top":${pyFloat(top)},"duty":${pyFloat(duty)}}`
  );
}

export function encodeCtl(kind: string, detail: string): string {
  return `{"type":"ctl","kind":${JSON.stringify(kind)},"detail":${JSON.stringify(detail)}}`;
}

export function encodeHelloReply(dtCtrl: number, digest: string): string {
  return (
    `{"type":"hello","version":${PROTOCOL_VERSION},"role":"controller",` +
    `"dt_ctrl":${pyFloat(dtCtrl)},"digest":${JSON.stringify(digest)}}`
  );
}
