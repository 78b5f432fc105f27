import json
import threading

import pytest

from chilsim.cli import main
from chilsim.link import ControllerServer, TcpTransport
from chilsim.runner import reference_tick_factory
from chilsim.scenario import builtin_cc_50, save_scenario
from dataclasses import replace


@pytest.fixture()
def short_scenario(tmp_path):
    cfg = replace(builtin_cc_50(), name="short", duration=0.01)
    path = tmp_path / "short.json"
    save_scenario(cfg, path)
    return path


def test_run_writes_outputs(short_scenario, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--scenario", str(short_scenario), "--out", str(out)])
    assert rc == 0
    assert (out / "trace.csv").exists()
    assert (out / "metrics.txt").exists()
    assert (out / "plot.svg").exists()
    text = (out / "metrics.txt").read_text()
    assert "overshoot_pct=" in text


def test_run_is_deterministic(short_scenario, tmp_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["run", "--scenario", str(short_scenario), "--out", str(out1)]) == 0
    assert main(["run", "--scenario", str(short_scenario), "--out", str(out2)]) == 0
    for name in ("trace.csv", "metrics.txt", "plot.svg"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_metrics_command(short_scenario, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--scenario", str(short_scenario), "--out", str(out)])
    capsys.readouterr()
    rc = main(["metrics", str(out / "trace.csv"), "--ref-v", "400", "--ref-i", "23"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "overshoot_pct=" in printed
    assert "stabilization_time=" in printed


def test_plot_command(short_scenario, tmp_path):
    out = tmp_path / "out"
    main(["run", "--scenario", str(short_scenario), "--out", str(out)])
    dest = tmp_path / "custom.svg"
    rc = main(["plot", str(out / "trace.csv"), "--signals", "vs,is", "-o", str(dest)])
    assert rc == 0
    assert dest.exists()


def test_unknown_signal_is_usage_error(short_scenario, tmp_path):
    out = tmp_path / "out"
    main(["run", "--scenario", str(short_scenario), "--out", str(out)])
    rc = main(["plot", str(out / "trace.csv"), "--signals", "nope", "-o", str(tmp_path / "x.svg")])
    assert rc == 2


def test_unknown_scenario_is_config_error(tmp_path):
    rc = main(["run", "--scenario", "missing_scenario", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_bad_listen_address(short_scenario, tmp_path):
    rc = main(
        ["run", "--scenario", str(short_scenario), "--out", str(tmp_path / "o"),
         "--transport", "tcp", "--listen", "not-an-address"]
    )
    assert rc == 2


def test_run_over_tcp_with_connecting_controller(short_scenario, tmp_path, capsys):
    out = tmp_path / "out"
    result = {}

    def cli_thread():
        result["rc"] = main(
            ["run", "--scenario", str(short_scenario), "--out", str(out),
             "--transport", "tcp", "--listen", "127.0.0.1:0"]
        )

    th = threading.Thread(target=cli_thread)
    th.start()
    # wait for the CLI to announce its bound port
    import re, time
    port = None
    seen = ""
    for _ in range(200):
        seen += capsys.readouterr().out
        m = re.search(r"listening on 127\.0\.0\.1:(\d+)", seen)
        if m:
            port = int(m.group(1))
            break
        time.sleep(0.02)
    assert port is not None, "CLI never announced its port"
    transport = TcpTransport.connect("127.0.0.1", port)
    ControllerServer(transport, reference_tick_factory).serve()
    th.join(20)
    assert result["rc"] == 0
    assert (out / "trace.csv").exists()
