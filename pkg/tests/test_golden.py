"""Byte-exact checks against the pinned protocol transcript."""

import os
import threading

import pytest

from chilsim.link import ControllerServer, InprocTransport
from chilsim.runner import reference_tick_factory
from chilsim.wire import decode_frame, encode_frame

GOLDEN = os.path.join(os.path.dirname(__file__), "..", "docs", "protocol-golden.txt")


def load_golden():
    records = []
    with open(GOLDEN, "rb") as fh:
        for raw in fh:
            if raw.startswith(b"#"):
                continue
            direction, payload = raw[:2], raw[2:]
            assert direction in (b"P>", b"C>")
            records.append((direction.decode(), payload))
    return records


@pytest.fixture(scope="module")
def golden():
    return load_golden()


def test_every_line_reencodes_to_identical_bytes(golden):
    for _, payload in golden:
        frame = decode_frame(payload)
        assert encode_frame(frame) == payload


def test_transcript_shape(golden):
    types = [decode_frame(p).__class__.__name__ for _, p in golden]
    assert types[0] == "HelloFrame" and types[1] == "HelloFrame"
    assert golden[-1][1].startswith(b'{"type":"end"')


def test_reference_controller_replays_byte_exact(golden):
    """Feed the plant lines to a live server; its output must match."""
    inbound = [p for d, p in golden if d == "P>"]
    expected = [p for d, p in golden if d == "C>"]

    plant_side, ctl_side = InprocTransport.pair()
    server = ControllerServer(ctl_side, reference_tick_factory, pause_demo=1)
    errors = []

    def run():
        try:
            server.serve()
        except BaseException as exc:
            errors.append(exc)

    th = threading.Thread(target=run, daemon=True)
    th.start()
    # lockstep through queues: send everything, then drain until close
    for line in inbound:
        plant_side.send_line(line)
    produced = []
    while True:
        reply = plant_side.recv_line(5.0)
        if reply is None:
            break
        produced.append(reply)
    th.join(5)
    assert not errors, errors
    assert produced == expected
