"""Regenerate docs/protocol-golden.txt.

The golden file pins the exact bytes of a short lockstep session: handshake,
three exchanges (the controller emits PAUSE heartbeats before each reply,
exercising the extra-time path), and the end marker.  Lines are prefixed
with the direction: "P>" plant to controller, "C>" controller to plant.

Run from the repository root:  python scripts/make_golden.py
"""

import os
import sys
from dataclasses import replace

from chilsim.link import PlantLink
from chilsim.runner import InprocController, run_scenario
from chilsim.scenario import builtin_cc_50

HEADER = """\
# Lockstep protocol golden transcript.
# One record per line; P> is plant to controller, C> controller to plant.
# Pinned byte-for-byte by the test suite on both sides of the wire.
# Regenerate with: python scripts/make_golden.py
"""


class RecordingTransport:
    def __init__(self, inner, log):
        self.inner = inner
        self.log = log

    def send_line(self, data):
        self.log.append(("P>", data))
        self.inner.send_line(data)

    def recv_line(self, timeout):
        line = self.inner.recv_line(timeout)
        if line is not None:
            self.log.append(("C>", line))
        return line

    def close(self):
        self.inner.close()


def main():
    log = []
    cfg = replace(builtin_cc_50(), name="golden", duration=3e-4)
    controller = InprocController(pause_demo=1)
    transport = RecordingTransport(controller.plant_transport, log)
    run_scenario(cfg, transport=transport)
    controller.finish()

    out = os.path.join(os.path.dirname(__file__), "..", "docs", "protocol-golden.txt")
    out = os.path.normpath(out)
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "wb") as fh:
        fh.write(HEADER.encode("utf-8"))
        for direction, data in log:
            fh.write(direction.encode("ascii") + data)
    print(f"wrote {out} ({len(log)} records)")


if __name__ == "__main__":
    sys.exit(main())
