/**
 * extctl: external controller process for the chilsim plant.
 *
 *   node dist/main.js --host 127.0.0.1 --port 7001 [--pause-demo N]
 *
 * All loop parameters arrive in the plant's hello. Exit codes: 0 clean
 * session, 10 connection failure, 11 protocol version mismatch, 12 config
 * digest mismatch, 13 protocol failure.
 */
import * as net from "node:net";
import { parseArgs } from "node:util";
import {
  ControllerSession,
  DigestMismatch,
  ProtocolFailure,
  RemoteFailure,
  VersionMismatch,
} from "./session.js";
import { encodeCtl } from "./wire.js";

function exitCodeFor(err: unknown): number {
  if (err instanceof VersionMismatch) return 11;
  if (err instanceof DigestMismatch) return 12;
  if (err instanceof ProtocolFailure || err instanceof RemoteFailure) return 13;
  const code = (err as NodeJS.ErrnoException).code;
  if (code === "ECONNREFUSED" || code === "ENOTFOUND" || code === "ETIMEDOUT") {
    return 10;
  }
  return 13;
}

function main(): void {
  const { values } = parseArgs({
    options: {
      host: { type: "string", default: "127.0.0.1" },
      port: { type: "string" },
      "pause-demo": { type: "string", default: "0" },
    },
  });
  if (!values.port) {
    console.error("usage: extctl --host H --port P [--pause-demo N]");
    process.exit(2);
  }
  const port = Number(values.port);
  const pauseDemo = Number(values["pause-demo"]);
  const session = new ControllerSession(pauseDemo);

  const socket = net.createConnection({ host: values.host, port });
  socket.setNoDelay(true);
  let buffer = "";

  const fail = (err: unknown): void => {
    const code = exitCodeFor(err);
    console.error(`extctl: ${(err as Error).message ?? err}`);
    if (code !== 10) {
      try {
        socket.write(encodeCtl("ERROR", String((err as Error).message ?? err)) + "\n");
      } catch {
        // the peer may already be gone
      }
    }
    socket.destroy();
    process.exit(code);
  };

  socket.on("error", fail);
  socket.on("data", (chunk: Buffer) => {
    buffer += chunk.toString("utf8");
    let idx: number;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, idx);
      buffer = buffer.slice(idx + 1);
      let out: string[];
      try {
        out = session.onLine(line);
      } catch (err) {
        fail(err);
        return;
      }
      if (out.length > 0) {
        socket.write(out.map((l) => l + "\n").join(""));
      }
      if (session.done) {
        socket.end();
        console.error(`extctl: session complete, ${session.served} exchanges`);
        process.exit(0);
      }
    }
  });
  socket.on("close", () => {
    if (!session.done) {
      fail(new ProtocolFailure("peer closed without END"));
    }
  });
}

main();
