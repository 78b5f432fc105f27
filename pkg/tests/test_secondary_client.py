"""Cross-runtime checks against the external TypeScript controller.

These run only when the client has been built (cd extctl && npm install &&
npm run build) and node is available; otherwise they skip with that hint.
"""

import json
import shutil
import socket
import subprocess
import threading
import time
from pathlib import Path

import pytest

from chilsim.link import accept_plant_connection, open_plant_listener
from chilsim.runner import run_scenario
from chilsim.scenario import builtin_cc_50
from chilsim.traceio import trace_to_csv_bytes

REPO = Path(__file__).resolve().parent.parent
CLIENT = REPO / "extctl" / "dist" / "main.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not CLIENT.exists(),
    reason="extctl not built (cd extctl && npm install && npm run build)",
)


def _spawn_client(port, pause_demo=0, host="127.0.0.1"):
    args = ["node", str(CLIENT), "--host", host, "--port", str(port)]
    if pause_demo:
        args += ["--pause-demo", str(pause_demo)]
    return subprocess.Popen(args, stdout=subprocess.PIPE, stderr=subprocess.PIPE)


def _run_against_client(pause_demo):
    srv = open_plant_listener("127.0.0.1", 0)
    _, port = srv.getsockname()
    proc = _spawn_client(port, pause_demo)
    try:
        transport = accept_plant_connection(srv, timeout=30.0)
        trace, report = run_scenario(builtin_cc_50(), transport=transport)
    finally:
        srv.close()
    out, err = proc.communicate(timeout=30)
    assert proc.returncode == 0, err.decode()
    return trace, report


class TestCrossRuntimeParity:
    def test_trace_bit_identical_to_inproc(self, cc50_result):
        baseline, _ = cc50_result
        trace, _ = _run_against_client(pause_demo=0)
        assert trace_to_csv_bytes(trace) == trace_to_csv_bytes(baseline)

    def test_pause_demo_changes_nothing(self, cc50_result):
        baseline, _ = cc50_result
        trace, _ = _run_against_client(pause_demo=3)
        assert trace_to_csv_bytes(trace) == trace_to_csv_bytes(baseline)


class TestRefusals:
    def _serve_one_line(self, line):
        """Accept one client and push a scripted hello at it."""
        srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind(("127.0.0.1", 0))
        srv.listen(1)
        port = srv.getsockname()[1]
        holder = {}

        def run():
            conn, _ = srv.accept()
            conn.sendall(line)
            # drain whatever the client replies until it disconnects
            conn.settimeout(10.0)
            try:
                while conn.recv(65536):
                    pass
            except OSError:
                pass
            conn.close()
            holder["done"] = True

        th = threading.Thread(target=run, daemon=True)
        th.start()
        return srv, port, th

    def test_version_mismatch_exit_code(self):
        bad = (
            b'{"type":"hello","version":99,"role":"plant","dt_ctrl":0.0001,'
            b'"config":{},"digest":""}\n'
        )
        srv, port, th = self._serve_one_line(bad)
        proc = _spawn_client(port)
        out, err = proc.communicate(timeout=30)
        srv.close()
        assert proc.returncode == 11, err.decode()

    def test_digest_mismatch_exit_code(self):
        from chilsim.control import (
            ControllerConfig,
            SupervisorConfig,
            config_to_obj,
            default_current_pid,
            default_voltage_pid,
        )

        cfg = ControllerConfig(default_voltage_pid(), default_current_pid(), SupervisorConfig())
        obj = config_to_obj(cfg, 1e-4)
        hello = {
            "type": "hello",
            "version": 1,
            "role": "plant",
            "dt_ctrl": 1e-4,
            "config": obj,
            "digest": "0" * 64,
        }
        line = (json.dumps(hello, separators=(",", ":")) + "\n").encode()
        srv, port, th = self._serve_one_line(line)
        proc = _spawn_client(port)
        out, err = proc.communicate(timeout=30)
        srv.close()
        assert proc.returncode == 12, err.decode()

    def test_connection_refused_exit_code(self):
        # bind then close to get a port nothing listens on
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        proc = _spawn_client(port)
        out, err = proc.communicate(timeout=30)
        assert proc.returncode == 10, err.decode()
