import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { controllerTick, freshState, scheduleGain } from "../src/control.js";
import { encodeCmd } from "../src/wire.js";
import { configDigest, parseLoopConfig, parseMeas } from "../src/wire.js";

interface Fixture {
  config: Record<string, unknown>;
  digest: string;
  dt_ctrl: number;
  sequences: {
    meas: Record<string, unknown>[];
    expected_cmd_lines: string[];
  }[];
}

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/tick-vectors.json", import.meta.url), "utf8"),
) as Fixture;

describe("gain schedule", () => {
  it("reproduces the published operating points", () => {
    const cfg = parseLoopConfig(fixture.config);
    expect(scheduleGain(20.0, cfg.voltagePid.kp)).toBe(1.0);
    expect(scheduleGain(10.0, cfg.voltagePid.kp)).toBe(0.5);
    expect(scheduleGain(-20.0, cfg.voltagePid.kp)).toBe(1.0);
  });
});

describe("config digest", () => {
  it("canonicalizes to the same sha256 as the plant side", () => {
    const cfg = parseLoopConfig(fixture.config);
    expect(configDigest(cfg)).toBe(fixture.digest);
  });
});

describe("controller tick parity", () => {
  it("emits command lines byte-identical to the reference controller", () => {
    const cfg = parseLoopConfig(fixture.config);
    for (const seqCase of fixture.sequences) {
      let ctl = freshState();
      seqCase.meas.forEach((raw, idx) => {
        const meas = parseMeas(raw);
        const [cmd, next] = controllerTick(meas, ctl, cfg);
        ctl = next;
        const line = encodeCmd(cmd.seq, cmd.mode, cmd.top, cmd.duty);
        expect(line, `sequence step ${idx}`).toBe(seqCase.expected_cmd_lines[idx]);
      });
    }
  });

  it("walks the full mode chain on the scripted sequence", () => {
    const cfg = parseLoopConfig(fixture.config);
    let ctl = freshState();
    const modes: string[] = [];
    for (const raw of fixture.sequences[0].meas) {
      const [cmd, next] = controllerTick(parseMeas(raw), ctl, cfg);
      ctl = next;
      if (modes[modes.length - 1] !== cmd.mode) {
        modes.push(cmd.mode);
      }
    }
    expect(modes).toEqual(["PRECHARGE", "CC", "CV", "DONE"]);
  });

  it("rejects stale sequence numbers", () => {
    const cfg = parseLoopConfig(fixture.config);
    const ctl = freshState();
    const meas = parseMeas(fixture.sequences[0].meas[0]);
    const [, next] = controllerTick(meas, ctl, cfg);
    expect(() => controllerTick(meas, next, cfg)).toThrow(/seq/);
  });
});
