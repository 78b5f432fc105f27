"""Regenerate the fixture files consumed by the extctl test suite.

Two fixtures:
  extctl/tests/fixtures/pyfloat.json  - double bit patterns paired with
    their shortest-round-trip decimal rendering (Python float repr), the
    formatting contract of the wire protocol;
  extctl/tests/fixtures/tick-vectors.json - a hello config plus measurement
    sequences and the exact command lines the reference controller emits
    for them (arithmetic parity vectors).

Run from the repository root: python scripts/make_ts_fixtures.py
"""

import json
import os
import random
import struct

from chilsim.control import (
    ControllerConfig,
    ControllerState,
    SupervisorConfig,
    config_to_obj,
    controller_tick,
    default_current_pid,
    default_voltage_pid,
)
from chilsim.wire import MeasurementFrame, config_digest, encode_frame

OUT_DIR = os.path.normpath(
    os.path.join(os.path.dirname(__file__), "..", "extctl", "tests", "fixtures")
)


def pyfloat_vectors():
    values = [
        0.0, -0.0, 1.0, -1.0, 0.5, 0.1, 0.27, 2.7, 300.0, 400.0, 345.6,
        0.0001, 1e-4, 9.999999999999999e-05, 7e-05, 1e-05, 5e-324,
        1.7976931348623157e308, -1.7976931348623157e308, 2.2250738585072014e-308,
        1e15, 1e16, 1e17, 9999999999999998.0, 123456789.12345679,
        0.00030000000000000003, 237.74853951296302, 0.2698338156132157,
        3.141592653589793, 1e21, 1.5e22, -2.5e-7, 4.9e-10, 0.3, 0.7,
        1.0 / 3.0, 2.0 / 3.0, 100.0 / 7.0,
    ]
    rng = random.Random(0xF10A7)
    while len(values) < 1200:
        x = struct.unpack("<d", struct.pack("<Q", rng.getrandbits(64)))[0]
        if x == x and x not in (float("inf"), float("-inf")):
            values.append(x)
    # magnitudes around the positional/scientific thresholds
    for k in range(-8, 20):
        values.append(float(10.0 ** k))
        values.append(float(10.0 ** k) * 1.2345678901234567)
    out = []
    for v in values:
        bits = struct.unpack("<Q", struct.pack("<d", v))[0]
        out.append([format(bits, "016x"), repr(v)])
    return out


def tick_vectors():
    cfg = ControllerConfig(default_voltage_pid(), default_current_pid(), SupervisorConfig())
    dt = 1e-4
    obj = config_to_obj(cfg, dt)
    digest = config_digest(obj)

    def run(meas_list):
        ctl = ControllerState()
        lines = []
        for m in meas_list:
            cmd, ctl = controller_tick(m, ctl, cfg, dt)
            lines.append(encode_frame(cmd).decode("ascii").rstrip("\n"))
        return lines

    rng = random.Random(0xBEEF)
    sequences = []

    # a scripted walk through every mode transition
    walk = []
    seq = 0
    for vs in (300.0, 329.4697767706932, 363.0, 391.5, 399.2):
        walk.append(MeasurementFrame(seq, seq * dt, 300.0, vs, 0.0, 0.0, False))
        seq += 1
    walk.append(MeasurementFrame(seq, seq * dt, 300.0, 399.9, 0.0, 56.53, True)); seq += 1
    for vs, is_ in ((388.0, 44.0), (375.0, 30.5), (368.0, 23.4), (367.7, 23.0)):
        walk.append(MeasurementFrame(seq, seq * dt, 299.0, vs, 28.0, is_, True)); seq += 1
    walk.append(MeasurementFrame(seq, seq * dt, 299.0, 400.05, 31.0, 8.7, True)); seq += 1
    for vs, is_ in ((400.01, 8.69), (400.0, 8.68), (400.0, 0.13)):
        walk.append(MeasurementFrame(seq, seq * dt, 299.0, vs, 31.0, is_, True)); seq += 1
    sequences.append(walk)

    # randomized sequences with occasional relay closure and events
    for _ in range(12):
        relay = False
        ms = []
        for k in range(40):
            if not relay and rng.random() < 0.15:
                relay = True
            ms.append(
                MeasurementFrame(
                    k,
                    k * dt,
                    300.0 - rng.random(),
                    rng.uniform(250.0, 410.0),
                    rng.uniform(0.0, 60.0),
                    rng.uniform(0.0, 60.0) if relay else 0.0,
                    relay,
                    event=rng.choice([None, None, None, "relay_closed", "v_ceiling"]),
                )
            )
        sequences.append(ms)

    def meas_obj(m):
        return {
            "seq": m.seq, "t": m.t_sim, "vp": m.v_primary, "vs": m.v_secondary,
            "ip": m.i_primary, "is": m.i_secondary, "relay": m.relay_closed,
            "event": m.event,
        }

    return {
        "config": obj,
        "digest": digest,
        "dt_ctrl": dt,
        "sequences": [
            {"meas": [meas_obj(m) for m in ms], "expected_cmd_lines": run(ms)}
            for ms in sequences
        ],
    }


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    with open(os.path.join(OUT_DIR, "pyfloat.json"), "w") as fh:
        json.dump(pyfloat_vectors(), fh)
        fh.write("\n")
    with open(os.path.join(OUT_DIR, "tick-vectors.json"), "w") as fh:
        json.dump(tick_vectors(), fh)
        fh.write("\n")
    print(f"wrote fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
