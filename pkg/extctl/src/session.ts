/**
 * Transport-agnostic controller session: feed it inbound lines, it
 * returns the lines to send back. The socket pump lives in main.ts so
 * tests can replay transcripts without any I/O.
 */
import {
  ControllerState,
  controllerTick,
  freshState,
} from "./control.js";
import {
  LoopConfig,
  PROTOCOL_VERSION,
  configDigest,
  encodeCmd,
  encodeCtl,
  encodeHelloReply,
  parseLoopConfig,
  parseMeas,
} from "./wire.js";

export class VersionMismatch extends Error {}
export class DigestMismatch extends Error {}
export class ProtocolFailure extends Error {}
export class RemoteFailure extends Error {}

export class ControllerSession {
  private cfg: LoopConfig | null = null;
  private ctl: ControllerState = freshState();
  private pauseDemo: number;
  done = false;
  served = 0;

  constructor(pauseDemo = 0) {
    this.pauseDemo = pauseDemo;
  }

  /** Process one inbound line; returns the lines to write back. */
  onLine(line: string): string[] {
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line) as Record<string, unknown>;
    } catch (err) {
      throw new ProtocolFailure(`malformed line: ${(err as Error).message}`);
    }
    const type = obj.type;
    if (type === "hello") {
      return this.handleHello(obj);
    }
    if (type === "meas") {
      return this.handleMeas(obj);
    }
    if (type === "ctl") {
      const kind = obj.kind;
      if (kind === "ERROR") {
        throw new RemoteFailure(String(obj.detail ?? ""));
      }
      return []; // READY / PAUSE / RESUME are timing-only
    }
    if (type === "end") {
      this.done = true;
      return [];
    }
    throw new ProtocolFailure(`unknown frame type ${String(type)}`);
  }

  private handleHello(obj: Record<string, unknown>): string[] {
    if (this.cfg !== null) {
      throw new ProtocolFailure("duplicate hello");
    }
    if (obj.version !== PROTOCOL_VERSION) {
      throw new VersionMismatch(
        `protocol version ${String(obj.version)} != ${PROTOCOL_VERSION}`,
      );
    }
    if (obj.role !== "plant") {
      throw new ProtocolFailure(`expected plant role, got ${String(obj.role)}`);
    }
    if (typeof obj.config !== "object" || obj.config === null) {
      throw new ProtocolFailure("plant hello carries no config");
    }
    const cfg = parseLoopConfig(obj.config);
    const digest = configDigest(cfg);
    if (digest !== obj.digest) {
      throw new DigestMismatch(
        "config digest mismatch: local canonicalization disagrees with the peer",
      );
    }
    this.cfg = cfg;
    return [encodeHelloReply(cfg.dtCtrl, digest), encodeCtl("READY", "")];
  }

  private handleMeas(obj: Record<string, unknown>): string[] {
    if (this.cfg === null) {
      throw new ProtocolFailure("measurement before hello");
    }
    const meas = parseMeas(obj);
    const out: string[] = [];
    for (let k = 0; k < this.pauseDemo; k += 1) {
      out.push(encodeCtl("PAUSE", "demo"));
    }
    if (this.pauseDemo > 0) {
      out.push(encodeCtl("RESUME", ""));
    }
    const [cmd, next] = controllerTick(meas, this.ctl, this.cfg);
    this.ctl = next;
    this.served += 1;
    out.push(encodeCmd(cmd.seq, cmd.mode, cmd.top, cmd.duty));
    return out;
  }
}
